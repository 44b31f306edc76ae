use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schrolab::experiment::{
    config::{parse_ladder, parse_resolutions},
    list_presets, run_config, run_preset, ExperimentConfig, Overrides, Preset, EXIT_CHECK_FAILED, EXIT_PARSE,
};
use schrolab::linsolve::SolveOptions;
use schrolab::Error;

#[derive(Parser)]
#[command(name = "schrolab", version, about = "Singular Schrödinger potentials on finite-difference grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset by name, or a `key = value` config file.
    Run(Box<RunArgs>),
    /// List the presets and the statement each one reproduces.
    ListPresets,
}

#[derive(Args)]
struct RunArgs {
    target: String,
    /// Node counts per axis, e.g. `65` or `33,65,129`.
    #[arg(long = "n", value_parser = resolutions)]
    n: Option<NodeCounts>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Geometric ladder `k0,ratio,max_rungs`.
    #[arg(long, value_parser = ladder)]
    ladder: Option<(f64, f64, usize)>,
    /// Relative L1 change that stops the ladder.
    #[arg(long)]
    tol_ladder: Option<f64>,
    #[arg(long)]
    tol_s: Option<f64>,
    #[arg(long)]
    tol_z: Option<f64>,
    #[arg(long)]
    tol_pos: Option<f64>,
    #[arg(long)]
    tol_zero: Option<f64>,
    #[arg(long)]
    tol_absorption: Option<f64>,
    #[arg(long)]
    tol_domination: Option<f64>,
    #[arg(long)]
    tol_comparison: Option<f64>,
    /// CG relative residual.
    #[arg(long, default_value_t = 1e-10)]
    tol_cg: f64,
}

#[derive(Clone)]
struct NodeCounts(Vec<usize>);

fn resolutions(s: &str) -> Result<NodeCounts, String> {
    parse_resolutions(s).map(NodeCounts).map_err(|e| e.to_string())
}

fn ladder(s: &str) -> Result<(f64, f64, usize), String> {
    parse_ladder(s).map_err(|e| e.to_string())
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Configuration(_)
        | Error::InvalidDomain(_)
        | Error::InvalidArgument(_)
        | Error::InvalidLadder(_)
        | Error::InvalidMeasure(_)
        | Error::ResolutionTooCoarse(_)
        | Error::EmptyDomain => EXIT_PARSE as u8,
        _ => EXIT_CHECK_FAILED as u8,
    }
}

fn run(args: RunArgs) -> Result<u8, Error> {
    let ov = Overrides {
        resolutions: args.n.map(|n| n.0),
        alpha: args.alpha,
        beta: args.beta,
        out: args.out,
        ladder: args.ladder,
        ladder_tol: args.tol_ladder,
        tau_s: args.tol_s,
        tau_z: args.tol_z,
        tau_pos: args.tol_pos,
        tau_zero: args.tol_zero,
        tol_absorption: args.tol_absorption,
        tol_domination: args.tol_domination,
        tol_comparison: args.tol_comparison,
    };
    let opts = SolveOptions { rel_tol: args.tol_cg, ..SolveOptions::default() };
    let (outcome, dir) = match args.target.parse::<Preset>() {
        Ok(preset) => (run_preset(preset, &ov, &opts)?, ov.out_dir(preset)),
        Err(_) => {
            let text = std::fs::read_to_string(&args.target).map_err(|e| {
                Error::Configuration(format!("`{}` is neither a preset nor a readable config: {e}", args.target))
            })?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            ov.apply(&mut cfg)?;
            (run_config(&cfg, &opts)?, cfg.out.clone())
        }
    };
    outcome.write(&dir)?;
    print!("{}", outcome.summary());
    Ok(outcome.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListPresets => {
            print!("{}", list_presets());
            ExitCode::SUCCESS
        }
        Command::Run(args) => match run(*args) {
            Ok(code) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_for(&e))
            }
        },
    }
}
