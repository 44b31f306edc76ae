//! `V = |x|^{-α}` on the unit disk. For `α ≥ 2` the torsion function
//! vanishes at the origin in the limit while staying put away from it.
use schrolab::experiment::value_near_singularity;
use schrolab::grid::{build_grid, DomainSpec};
use schrolab::linsolve::SolveOptions;
use schrolab::potential::{Potential, TruncationLadder};
use schrolab::schrodinger::solve_ladder;

fn main() -> schrolab::Result<()> {
    let alpha: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3.0);
    let v = Potential::point([0.0, 0.0], alpha);
    println!("alpha = {alpha}");
    for n in [33, 65, 129] {
        let grid = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, n))?;
        let (u, rep) = solve_ladder(&grid, &v, &grid.constant(1.0), &TruncationLadder::default(), &SolveOptions::default())?;
        println!(
            "n={n:<3} u near 0 = {:.4e}  u(0.5, 0) = {:.5}  rungs = {}",
            value_near_singularity(&grid, &v, &u, [0.0, 0.0]),
            u.get(grid.nearest_node([0.5, 0.0])),
            rep.rungs.len()
        );
    }
    Ok(())
}
