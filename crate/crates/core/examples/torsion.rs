//! Torsion functions on the three domain kinds, compared with the exact
//! value where one is known.
use schrolab::grid::{build_grid, DomainSpec};
use schrolab::linsolve::SolveOptions;
use schrolab::schrodinger::torsion;

fn main() -> schrolab::Result<()> {
    let opts = SolveOptions::default();
    let line = build_grid(DomainSpec::interval(-1.0, 1.0, 65))?;
    let (theta, stats) = torsion(&line, &opts)?;
    let err = line
        .nodes()
        .iter()
        .zip(theta.values())
        .map(|(p, v)| (v - 0.5 * (1.0 - p[0] * p[0])).abs())
        .fold(0.0, f64::max);
    println!("interval: max error vs (1-x^2)/2 = {err:.2e} after {} CG iterations", stats.iterations);

    for n in [33, 65, 129] {
        let disk = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, n))?;
        let (theta, _) = torsion(&disk, &opts)?;
        println!("disk n={n:<3} max = {:.5} (exact 0.25, h = {:.4})", theta.max(), disk.h());
    }

    let square = build_grid(DomainSpec::rectangle(-1.0, 1.0, -1.0, 1.0, 65))?;
    let (theta, _) = torsion(&square, &opts)?;
    println!("square n=65 max = {:.5} (series value 0.29469)", theta.max());
    Ok(())
}
