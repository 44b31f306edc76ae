//! `V = |x|^{-α}` on `(-1, 1)`: the grid classifier next to the shell
//! quadrature test for a range of exponents.
use schrolab::linsolve::SolveOptions;
use schrolab::potential::{Potential, TruncationLadder};
use schrolab::principles::{hopf_criterion_1d, oned_regime_classifier};

fn main() -> schrolab::Result<()> {
    let ladder = TruncationLadder::default();
    let opts = SolveOptions::default();
    println!("alpha  grid          quadrature    hopf value");
    for alpha in [0.5, 0.9, 1.2, 1.5, 1.9, 2.0, 2.5, 3.0] {
        let c = oned_regime_classifier(alpha, &ladder, 33, &opts)?;
        let hopf = hopf_criterion_1d(&Potential::point([0.0, 0.0], alpha), 0.0, 0.5)?;
        println!(
            "{alpha:<5}  {:<12}  {:<12}  {}",
            c.grid_regime.map_or("inconclusive", |r| r.as_str()),
            c.quadrature_regime.as_str(),
            hopf.value.map_or("divergent".to_owned(), |v| format!("{v:.6}"))
        );
    }
    Ok(())
}
