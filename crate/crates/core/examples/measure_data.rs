//! Duality solutions for measure data: a Dirac mass next to its mollified
//! versions, plus the absorption estimate for each.
use schrolab::grid::{build_grid, DomainSpec};
use schrolab::linsolve::SolveOptions;
use schrolab::potential::{Potential, TruncationLadder};
use schrolab::schrodinger::{solve_measure, verify_estimates, MeasureData};

fn main() -> schrolab::Result<()> {
    let grid = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, 65))?;
    let v = Potential::point([0.0, 0.0], 1.5);
    let ladder = TruncationLadder::default();
    let opts = SolveOptions::default();
    let atom = [0.3, -0.2];

    let delta = MeasureData::dirac(atom, 1.0);
    let (ud, rep) = solve_measure(&grid, &v, &delta, &ladder, &opts)?;
    let est = verify_estimates(&grid, &v, &delta, &ud, &rep, &opts)?;
    println!("delta: ‖u‖₁ = {:.5}  absorption margin = {:.3e}", grid.norms(&ud)?.l1, est.absorption_margin);

    for r in [8.0, 4.0, 2.0] {
        let smooth = MeasureData::dirac(atom, 1.0).mollified(vec![r * grid.h()]);
        let (us, _) = solve_measure(&grid, &v, &smooth, &ladder, &opts)?;
        let gap = grid.norms(&us.lin_comb(1.0, &ud, -1.0)?)?.l1;
        println!("mollified r = {r}h: ‖u_r - u_δ‖₁ = {gap:.3e}");
    }
    Ok(())
}
