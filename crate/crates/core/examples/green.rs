//! Green's functions of `-Δ + |x|^{-3}` on the unit disk: symmetry and the
//! representation formula `ζ_f(x) = ∫ G_x f`.
use schrolab::green::{green_batch, representation_check, symmetry_defect};
use schrolab::grid::{build_grid, DomainSpec};
use schrolab::linsolve::SolveOptions;
use schrolab::potential::{Potential, TruncationLadder};

fn main() -> schrolab::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(65);
    let grid = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, n))?;
    let v = Potential::point([0.0, 0.0], 3.0);
    let ladder = TruncationLadder::default();
    let opts = SolveOptions::default();

    let greens = green_batch(&grid, &v, &[[-0.4, 0.1], [0.45, -0.05]], &ladder, &opts)?;
    let (x, y) = (&greens[0], &greens[1]);
    println!("G_x(y) = {:.6e}", x.field.get(y.source_node));
    println!("G_y(x) = {:.6e}", y.field.get(x.source_node));
    println!("symmetry defect = {:.2e}", symmetry_defect(&grid, x, y)?);

    let samples = [[0.3, 0.2], [-0.4, 0.1], [0.1, -0.5]];
    let rep = representation_check(&grid, &v, &grid.constant(1.0), &samples, &ladder, &opts)?;
    for s in &rep.samples {
        println!(
            "x = ({:5.2}, {:5.2})  ζ_1(x) = {:.6e}  ∫G_x = {:.6e}",
            s.point[0], s.point[1], s.direct, s.via_green
        );
    }
    Ok(())
}
