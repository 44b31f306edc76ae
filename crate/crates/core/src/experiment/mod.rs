//! Experiment runner: named presets, flat configs, CSV outputs and a
//! `CHECK` summary per experiment.
//!
//! Output layout for a single resolution is flat under the output
//! directory; with several resolutions each one gets an `n<N>/`
//! subdirectory and `summary.txt` stays at the top.

pub mod config;
mod presets;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use config::{indicator, DataSpec, ExperimentConfig, Tolerances};
pub use presets::{expected_regime, list_presets, run_preset, value_near_singularity, Overrides, Preset};

use crate::error::{Error, Result};
use crate::grid::{build_grid, DomainSpec, Field, Grid};
use crate::linsolve::SolveOptions;
use crate::principles::{check_alternative, check_comparison, verdict_csv, ComparisonParams, Sign};
use crate::schrodinger::{solve_measure, verify_estimates, LadderReport, MeasureData};
use crate::zeroset::{analyze, ZeroSetReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// One line of the summary. A check passes iff its margin is nonnegative,
/// except where a strict inequality is stated.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
}

impl Check {
    pub fn at_least(name: impl Into<String>, margin: f64) -> Self {
        Check { name: name.into(), passed: margin >= 0.0, margin }
    }

    pub fn strictly(name: impl Into<String>, margin: f64) -> Self {
        Check { name: name.into(), passed: margin > 0.0, margin }
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("CHECK {} {} margin={:.6e}", self.name, status, self.margin + 0.0)
    }
}

/// Result of one experiment: checks, notes and the files to write.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub statement: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub solver_failed: bool,
    /// Relative path and contents, written under the output directory.
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    pub fn new(name: &str, statement: &str) -> Self {
        Outcome { name: name.to_owned(), statement: statement.to_owned(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.solver_failed {
            EXIT_NONCONVERGENCE
        } else if self.passed() {
            EXIT_PASS
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn file(&mut self, path: impl Into<PathBuf>, contents: String) {
        self.files.push((path.into(), contents));
    }

    pub fn track(&mut self, report: &LadderReport) {
        if !report.solver_converged() {
            self.solver_failed = true;
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment {}", self.name);
        let _ = writeln!(s, "statement {}", self.statement);
        for n in &self.notes {
            let _ = writeln!(s, "NOTE {n}");
        }
        for c in &self.checks {
            let _ = writeln!(s, "{}", c.line());
        }
        let _ = writeln!(s, "RESULT {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }

    /// Folds `other` in, prefixing its check names and file paths.
    pub fn absorb(&mut self, prefix: &str, other: Outcome) {
        let summary = other.summary();
        for c in other.checks {
            self.checks.push(Check { name: format!("{prefix}/{}", c.name), ..c });
        }
        self.solver_failed |= other.solver_failed;
        for (p, body) in other.files {
            self.files.push((Path::new(prefix).join(p), body));
        }
        self.files.push((Path::new(prefix).join("summary.txt"), summary));
    }

    /// Writes every file plus `summary.txt`, each through a temporary file
    /// and a rename.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Configuration(format!("cannot write to {}: {e}", dir.display()));
        for (rel, body) in self.files.iter().chain(std::iter::once(&(PathBuf::from("summary.txt"), self.summary()))) {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(io)?;
            }
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, body).map_err(io)?;
            fs::rename(&tmp, &path).map_err(io)?;
        }
        Ok(())
    }
}

/// Name suffix that tells resolutions apart when there are several.
pub(crate) fn tag(name: &str, n: usize, multi: bool) -> String {
    if multi {
        format!("{name}@n{n}")
    } else {
        name.to_owned()
    }
}

pub(crate) fn subdir(n: usize, multi: bool) -> PathBuf {
    if multi {
        PathBuf::from(format!("n{n}"))
    } else {
        PathBuf::new()
    }
}

/// Everything computed for one resolution of a config.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub n: usize,
    pub grid: Grid,
    pub zeta1: Field,
    pub torsion_ladder: LadderReport,
    pub zeroset: ZeroSetReport,
    pub data: MeasureData,
    pub u: Field,
    pub u_ladder: LadderReport,
}

pub fn solve_resolution(cfg: &ExperimentConfig, n: usize, opts: &SolveOptions) -> Result<Resolution> {
    let grid = build_grid(DomainSpec::new(cfg.domain, n))?;
    let (zeta1, torsion_ladder, zeroset) = analyze(&grid, &cfg.potential, &cfg.ladder, opts, &cfg.thresholds)?;
    let data = cfg.data.measure(&grid);
    let (u, u_ladder) = solve_measure(&grid, &cfg.potential, &data, &cfg.ladder, opts)?;
    Ok(Resolution { n, grid, zeta1, torsion_ladder, zeroset, data, u, u_ladder })
}

/// `i,j,x,y,s,z,component` per node (`i,x,s,z,component` in 1D);
/// nodes in `S` carry component `-1`.
pub fn masks_csv(grid: &Grid, report: &ZeroSetReport) -> String {
    let mut s = String::from(if grid.dim() == 1 { "i,x,s,z,component\n" } else { "i,j,x,y,s,z,component\n" });
    for idx in 0..grid.len() {
        let [i, j] = grid.lattice_index(idx);
        let p = grid.node(idx);
        let comp = report.labels.label(idx).map_or(-1, |l| l as i64);
        let (sm, zm) = (report.s.contains(idx) as u8, report.z.contains(idx) as u8);
        if grid.dim() == 1 {
            let _ = writeln!(s, "{i},{},{sm},{zm},{comp}", p[0]);
        } else {
            let _ = writeln!(s, "{i},{j},{},{},{sm},{zm},{comp}", p[0], p[1]);
        }
    }
    s
}

/// The checks every experiment runs, plus the standard field dumps.
pub fn generic_checks(
    cfg: &ExperimentConfig,
    r: &Resolution,
    multi: bool,
    opts: &SolveOptions,
    out: &mut Outcome,
) -> Result<()> {
    let (grid, n) = (&r.grid, r.n);
    let dir = subdir(n, multi);
    out.track(&r.torsion_ladder);
    out.track(&r.u_ladder);
    for c in &r.zeroset.components {
        out.track(&c.ladder);
    }

    let est = verify_estimates(grid, &cfg.potential, &r.data, &r.u, &r.u_ladder, opts)?;
    out.check(Check::at_least(tag("absorption", n, multi), est.absorption_margin + cfg.tolerances.absorption));
    if let Some(m) = est.domination_margin {
        out.check(Check::at_least(tag("domination", n, multi), m + cfg.tolerances.domination));
    }

    let params = ComparisonParams::from_torsion(grid, cfg.comparison_alpha, opts)?;
    let cmp = check_comparison(grid, &cfg.potential, &r.data, &cfg.ladder, &params, opts)?;
    out.track(&cmp.u_ladder);
    out.track(&cmp.w_ladder);
    out.check(Check::at_least(tag("comparison", n, multi), cmp.margin + cfg.tolerances.comparison * cmp.u_max));

    let alt = check_alternative(&r.u, &r.zeta1, &r.zeroset, cfg.tolerances.tau_pos, cfg.tolerances.tau_zero);
    let violations = alt.components.iter().filter(|c| matches!(c.sign, Sign::Violation { .. })).count();
    out.check(Check::at_least(tag("alternative", n, multi), -(violations as f64)));

    let s_measure = r.zeroset.s.count() as f64 * grid.cell_volume();
    let z_measure = r.zeroset.z.count() as f64 * grid.cell_volume();
    out.note(format!(
        "n={n} h={} components={} |S|={s_measure} |Z|={z_measure} ladder_rungs={} ladder_converged={} final_k={}",
        grid.h(),
        r.zeroset.labels.count(),
        r.torsion_ladder.rungs.len(),
        r.torsion_ladder.converged,
        r.torsion_ladder.final_k()
    ));

    out.file(dir.join("torsion.csv"), grid.field_csv(&r.zeta1)?);
    out.file(dir.join("ladder.csv"), r.torsion_ladder.to_csv());
    out.file(dir.join("solution.csv"), grid.field_csv(&r.u)?);
    out.file(dir.join("solution_ladder.csv"), r.u_ladder.to_csv());
    out.file(dir.join("zeroset.csv"), r.zeroset.to_csv());
    out.file(dir.join("masks.csv"), masks_csv(grid, &r.zeroset));
    out.file(dir.join("verdicts.csv"), verdict_csv(&[(&cfg.name, &alt)]));
    Ok(())
}

/// Runs a parsed config: generic checks at every resolution.
pub fn run_config(cfg: &ExperimentConfig, opts: &SolveOptions) -> Result<Outcome> {
    let mut out = Outcome::new(&cfg.name, &format!("potential `{}` on `{}` with data `{}`", cfg.potential, cfg.domain, cfg.data));
    let multi = cfg.resolutions.len() > 1;
    for &n in &cfg.resolutions {
        let r = solve_resolution(cfg, n, opts)?;
        generic_checks(cfg, &r, multi, opts, &mut out)?;
    }
    Ok(out)
}
