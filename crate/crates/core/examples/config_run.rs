//! Runs a flat config given inline, the same format `schrolab run <file>`
//! accepts, and writes its outputs under `out/config-run`.
use std::path::Path;

use schrolab::experiment::{run_config, ExperimentConfig};
use schrolab::linsolve::SolveOptions;

const CONFIG: &str = "\
name = config-run
domain = rect -1 1 -1 1
potential = point 0.25 0.25 alpha=2.5 + const 1
data = atom -0.4 -0.3 w=1 + atom 0.5 -0.5 w=0.5
resolutions = 33, 65
";

fn main() -> schrolab::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let outcome = run_config(&cfg, &SolveOptions::default())?;
    outcome.write(Path::new("out/config-run"))?;
    print!("{}", outcome.summary());
    std::process::exit(outcome.exit_code());
}
