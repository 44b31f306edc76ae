//! Zero-set pipeline step by step: torsion ladder, `S`, components, defect
//! classification and the orthogonality of `Z` and its complement.
use schrolab::grid::{build_grid, DomainSpec};
use schrolab::linsolve::SolveOptions;
use schrolab::potential::{Potential, TruncationLadder};
use schrolab::schrodinger::solve_ladder;
use schrolab::zeroset::{classify_and_build_z, components, detect_s, orthogonality, ZeroSetThresholds};

fn main() -> schrolab::Result<()> {
    let grid = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, 65))?;
    let v: Potential = "hyperplane x1 c=-0.3 alpha=3 + hyperplane x1 c=0.4 alpha=1.5".parse()?;
    let ladder = TruncationLadder::default();
    let opts = SolveOptions::default();
    let thresholds = ZeroSetThresholds::default();

    let (zeta1, rep) = solve_ladder(&grid, &v, &grid.constant(1.0), &ladder, &opts)?;
    println!("torsion ladder: {} rungs, converged = {}", rep.rungs.len(), rep.converged);
    let s = detect_s(&zeta1, thresholds.tau_s)?;
    let labels = components(&grid, &s);
    println!("|S| = {} nodes, {} components of the rest", s.count(), labels.count());

    let report = classify_and_build_z(&grid, &v, &s, &labels, &ladder, &opts, &thresholds)?;
    print!("{}", report.to_csv());
    let o = orthogonality(&grid, &v, &report.z, &ladder, &opts)?;
    println!("∫ζ(χ_rest)χ_Z = {:.3e}  ∫ζ(χ_Z)χ_rest = {:.3e}", o.off_z_on_z, o.on_z_off_z);
    Ok(())
}
