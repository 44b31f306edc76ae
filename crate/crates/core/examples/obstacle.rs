//! `V = dist(x, ω)^{-α}` around the disk `ω = B_0.3`: the defect measure of
//! the region outside `ω` for a few exponents.
use schrolab::grid::{build_grid, DomainKind, DomainSpec};
use schrolab::linsolve::SolveOptions;
use schrolab::potential::{Potential, TruncationLadder};
use schrolab::zeroset::{analyze, ZeroSetThresholds};

fn main() -> schrolab::Result<()> {
    let grid = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, 65))?;
    let omega = DomainKind::Disk { center: [0.0, 0.0], radius: 0.3 };
    for alpha in [0.5, 1.5, 2.5, 3.0] {
        let v = Potential::distance_to_set(omega, alpha);
        let (_, _, rep) = analyze(&grid, &v, &TruncationLadder::default(), &SolveOptions::default(), &ZeroSetThresholds::default())?;
        let outside = rep.components.iter().max_by_key(|c| c.node_count);
        match outside {
            Some(c) => println!(
                "alpha = {alpha}: {} component(s), outer defect = {:.4e} -> {}  |Z| nodes = {}",
                rep.components.len(),
                c.defect,
                c.verdict.as_str(),
                rep.z.count()
            ),
            None => println!("alpha = {alpha}: no component outside S"),
        }
    }
    Ok(())
}
