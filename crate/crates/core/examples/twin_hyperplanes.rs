//! Two singular lines `x₁ = -0.3` and `x₁ = 0.4` with exponents `α` and
//! `β`. A line with exponent in `[1, 2)` swallows its neighbourhood into
//! the zero-set; exponents `≥ 2` split the disk into independent pieces.
use schrolab::experiment::{run_preset, Overrides, Preset};
use schrolab::linsolve::SolveOptions;

fn main() -> schrolab::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>().ok());
    let ov = Overrides {
        alpha: args.next().flatten(),
        beta: args.next().flatten(),
        resolutions: Some(vec![65]),
        ..Default::default()
    };
    let out = run_preset(Preset::ExampleTwin, &ov, &SolveOptions::default())?;
    print!("{}", out.summary());
    Ok(())
}
