//! Named experiments.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{generic_checks, solve_resolution, subdir, tag, Check, ExperimentConfig, Outcome, Resolution};
use crate::error::{Error, Result};
use crate::green::{batch_csv, green_batch, green_function, representation_check, symmetry_defect};
use crate::grid::{build_grid, DomainKind, DomainSpec, Field, Grid, Point};
use crate::linsolve::SolveOptions;
use crate::potential::{Potential, TruncationLadder};
use crate::principles::{
    check_alternative, check_comparison, comparison_h, hopf_criterion_1d, oned_regime_classifier, ComparisonParams,
    OnedRegime, Sign,
};
use crate::schrodinger::{solve_ladder, solve_measure, solve_truncated, torsion, verify_estimates, MeasureData};
use crate::zeroset::{orthogonality, solve_off_z, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    ExamplePoint,
    ExampleTwin,
    ExampleObstacle,
    OnedSweep,
    VerifyAll,
}

impl Preset {
    pub const ALL: [Preset; 5] =
        [Preset::ExamplePoint, Preset::ExampleTwin, Preset::ExampleObstacle, Preset::OnedSweep, Preset::VerifyAll];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::ExamplePoint => "example-point",
            Preset::ExampleTwin => "example-twin",
            Preset::ExampleObstacle => "example-obstacle",
            Preset::OnedSweep => "oned-sweep",
            Preset::VerifyAll => "verify-all",
        }
    }

    /// The statement each preset reproduces.
    pub fn statement(&self) -> &'static str {
        match self {
            Preset::ExamplePoint => {
                "point singularity |x-a|^-alpha, alpha >= 2: every nontrivial solution vanishes at a and only there"
            }
            Preset::ExampleTwin => {
                "two singular hyperplanes x1 = a, x1 = b: the disk splits in three independent regions; \
                 with alpha >= 2 > beta >= 1 the zero-set is {x1 >= a}"
            }
            Preset::ExampleObstacle => {
                "distance to an obstacle d(x, w)^-alpha: 1 <= alpha < 2 admits only the trivial solution, \
                 alpha >= 2 gives the zero-set w"
            }
            Preset::OnedSweep => {
                "1D |x|^-alpha: the Hopf lemma fails at 0 iff the integral of V(x) x diverges near 0, i.e. alpha >= 2"
            }
            Preset::VerifyAll => "every preset plus the invariant suite",
        }
    }

    fn default_resolutions(&self) -> Vec<usize> {
        match self {
            Preset::OnedSweep | Preset::VerifyAll => vec![33],
            _ => vec![33, 65, 129],
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Configuration(format!("unknown preset `{s}`")))
    }
}

pub fn list_presets() -> String {
    let mut s = String::new();
    for p in Preset::ALL {
        let _ = writeln!(s, "{:<18}{}", p.name(), p.statement());
    }
    s
}

/// Command-line adjustments to a preset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub resolutions: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub out: Option<PathBuf>,
    /// `(k0, ratio, max_rungs)`.
    pub ladder: Option<(f64, f64, usize)>,
    pub ladder_tol: Option<f64>,
    pub tau_s: Option<f64>,
    pub tau_z: Option<f64>,
    pub tau_pos: Option<f64>,
    pub tau_zero: Option<f64>,
    pub tol_absorption: Option<f64>,
    pub tol_domination: Option<f64>,
    pub tol_comparison: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(r) = &self.resolutions {
            cfg.resolutions = r.clone();
        }
        if self.ladder.is_some() || self.ladder_tol.is_some() {
            let (k0, ratio, max) = self.ladder.unwrap_or((1.0, 2.0, 24));
            cfg.ladder = TruncationLadder::geometric(k0, ratio, max, self.ladder_tol.unwrap_or(cfg.ladder.stop_tol()))?;
        }
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.thresholds.tau_s, self.tau_s);
        set(&mut cfg.thresholds.tau_z, self.tau_z);
        set(&mut cfg.tolerances.tau_pos, self.tau_pos);
        set(&mut cfg.tolerances.tau_zero, self.tau_zero);
        set(&mut cfg.tolerances.absorption, self.tol_absorption);
        set(&mut cfg.tolerances.domination, self.tol_domination);
        set(&mut cfg.tolerances.comparison, self.tol_comparison);
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        Ok(())
    }

    pub fn out_dir(&self, preset: Preset) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out").join(preset.name()))
    }
}

const UNIT_DISK: DomainKind = DomainKind::Disk { center: [0.0, 0.0], radius: 1.0 };
const TWIN_A: f64 = -0.3;
const TWIN_B: f64 = 0.4;
const OBSTACLE: DomainKind = DomainKind::Disk { center: [0.0, 0.0], radius: 0.3 };
/// Interior sample points for the representation formula.
pub const REPRESENTATION_SAMPLES: [Point; 5] = [[0.3, 0.2], [-0.4, 0.1], [0.1, -0.5], [-0.2, -0.3], [0.55, 0.35]];
/// Green symmetry sources on opposite sides of the singular point.
pub const SYMMETRY_SOURCES: [Point; 2] = [[-0.4, 0.1], [0.45, -0.05]];

fn preset_config(preset: Preset, ov: &Overrides) -> Result<ExperimentConfig> {
    let alpha = ov.alpha;
    let mut cfg = match preset {
        Preset::ExamplePoint => {
            ExperimentConfig::new(preset.name(), UNIT_DISK, Potential::point([0.0, 0.0], alpha.unwrap_or(3.0)))
        }
        Preset::ExampleTwin => ExperimentConfig::new(
            preset.name(),
            UNIT_DISK,
            Potential::Sum(vec![
                Potential::hyperplane(0, TWIN_A, alpha.unwrap_or(3.0)),
                Potential::hyperplane(0, TWIN_B, ov.beta.unwrap_or(1.5)),
            ]),
        ),
        Preset::ExampleObstacle => ExperimentConfig::new(
            preset.name(),
            UNIT_DISK,
            Potential::distance_to_set(OBSTACLE, alpha.unwrap_or(1.5)),
        ),
        Preset::OnedSweep | Preset::VerifyAll => ExperimentConfig::new(
            preset.name(),
            DomainKind::Interval { a: -1.0, b: 1.0 },
            Potential::point([0.0, 0.0], alpha.unwrap_or(2.5)),
        ),
    };
    cfg.resolutions = preset.default_resolutions();
    ov.apply(&mut cfg)?;
    Ok(cfg)
}

/// Runs a preset without touching the file system.
pub fn run_preset(preset: Preset, ov: &Overrides, opts: &SolveOptions) -> Result<Outcome> {
    match preset {
        Preset::OnedSweep => oned_sweep(ov, opts),
        Preset::VerifyAll => verify_all(ov, opts),
        _ => {
            let cfg = preset_config(preset, ov)?;
            let mut out = Outcome::new(preset.name(), preset.statement());
            let multi = cfg.resolutions.len() > 1;
            let mut runs = Vec::new();
            for &n in &cfg.resolutions {
                let r = solve_resolution(&cfg, n, opts)?;
                generic_checks(&cfg, &r, multi, opts, &mut out)?;
                runs.push(r);
            }
            match preset {
                Preset::ExamplePoint => point_checks(&cfg, &runs, opts, &mut out)?,
                Preset::ExampleTwin => twin_checks(&cfg, &runs, ov, opts, &mut out)?,
                _ => obstacle_checks(&cfg, &runs, opts, &mut out)?,
            }
            Ok(out)
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn point_checks(cfg: &ExperimentConfig, runs: &[Resolution], opts: &SolveOptions, out: &mut Outcome) -> Result<()> {
    let multi = runs.len() > 1;
    let v = &cfg.potential;
    let mut at_a = Vec::new();
    let mut at_half = Vec::new();
    for r in runs {
        let (g, n) = (&r.grid, r.n);
        at_a.push(value_near_singularity(g, v, &r.zeta1, [0.0, 0.0]));
        at_half.push(r.zeta1.get(g.nearest_node([0.5, 0.0])));

        let rep = representation_check(g, v, &g.constant(1.0), &REPRESENTATION_SAMPLES, &cfg.ladder, opts)?;
        out.check(Check::at_least(tag("representation", n, multi), 0.02 - rep.max_relative_error));

        let greens = green_batch(g, v, &SYMMETRY_SOURCES, &cfg.ladder, opts)?;
        let cross = greens[0].field.get(greens[1].source_node).max(greens[1].field.get(greens[0].source_node));
        let defect = symmetry_defect(g, &greens[0], &greens[1])?;
        out.check(Check::at_least(tag("green-symmetry", n, multi), 0.02 * cross - defect));
        for gf in &greens {
            out.track(&gf.report);
        }
        for (name, body) in batch_csv(g, &greens)? {
            out.file(subdir(n, multi).join(name), body);
        }

        let params = ComparisonParams::from_torsion(g, cfg.comparison_alpha, opts)?;
        let dirac = MeasureData::dirac([0.3, 0.2], 1.0);
        let cmp = check_comparison(g, v, &dirac, &cfg.ladder, &params, opts)?;
        out.check(Check::at_least(tag("comparison-dirac", n, multi), cmp.margin + cfg.tolerances.comparison * cmp.u_max));
        let pinned = r.zeta1.get(g.nearest_node([0.0, 0.0]));
        out.note(format!(
            "n={n} u_pinned(a)={pinned} u_near(a)={} u(a+(0.5,0))={}",
            at_a.last().unwrap(),
            at_half.last().unwrap()
        ));
    }
    if multi {
        let dec = at_a.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        out.check(Check::strictly("decrease-at-a", dec));
        let drift = at_half.windows(2).map(|w| relative(w[0], w[1])).fold(0.0, f64::max);
        out.check(Check::at_least("stable-at-half", 0.05 - drift));
    }
    Ok(())
}

/// Value of `u` at the nodes closest to `a` among those where `V` is
/// finite (largest value on ties). A node sitting on a non-integrable
/// singularity only carries the truncation residual of the last rung.
pub fn value_near_singularity(grid: &Grid, potential: &Potential, u: &Field, a: Point) -> f64 {
    let samples = potential.sample(grid);
    let mut best = (f64::INFINITY, 0.0);
    for (i, &v) in samples.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        let d = grid.point_distance(grid.node(i), a);
        if d < best.0 - 1e-12 {
            best = (d, u.get(i));
        } else if (d - best.0).abs() <= 1e-12 {
            best.1 = f64::max(best.1, u.get(i));
        }
    }
    best.1
}

fn verdict_mismatches(got: &[Verdict], want: &[Verdict]) -> f64 {
    if got.len() != want.len() {
        return -(got.len().abs_diff(want.len()) as f64).max(1.0);
    }
    -(got.iter().zip(want).filter(|(a, b)| a != b).count() as f64)
}

fn twin_checks(
    cfg: &ExperimentConfig,
    runs: &[Resolution],
    ov: &Overrides,
    opts: &SolveOptions,
    out: &mut Outcome,
) -> Result<()> {
    let multi = runs.len() > 1;
    let (alpha, beta) = (ov.alpha.unwrap_or(3.0), ov.beta.unwrap_or(1.5));
    let v = &cfg.potential;
    for r in runs {
        let (g, n) = (&r.grid, r.n);
        let h = g.h();
        let rep = &r.zeroset;
        if alpha >= 1.0 && beta >= 1.0 {
            let m = if rep.labels.count() == 3 { 0.0 } else { -1.0 };
            out.check(Check::at_least(tag("three-components", n, multi), m));
        }
        if alpha >= 2.0 && (1.0..2.0).contains(&beta) {
            use Verdict::*;
            out.check(Check::at_least(
                tag("verdicts", n, multi),
                verdict_mismatches(&rep.verdicts(), &[NotInZ, InZ, InZ]),
            ));
            let (u, lr) = solve_off_z(g, v, &g.constant(1.0), &rep.z, &cfg.ladder, opts)?;
            out.track(&lr);
            let top = u.max();
            let mut right = f64::NEG_INFINITY;
            let mut left = f64::INFINITY;
            for (i, p) in g.nodes().iter().enumerate() {
                if p[0] >= TWIN_A + 4.0 * h {
                    right = right.max(u.get(i));
                }
                if p[0] <= TWIN_A - 4.0 * h && 1.0 - p[0].hypot(p[1]) >= 4.0 * h {
                    left = left.min(u.get(i));
                }
            }
            out.check(Check::at_least(tag("vanishes-right-of-a", n, multi), 1e-2 * top - right));
            out.check(Check::strictly(tag("positive-left-of-a", n, multi), left - 1e-3 * top));
            out.file(subdir(n, multi).join("solution_off_z.csv"), g.field_csv(&u)?);
        }
        if alpha >= 2.0 && beta >= 2.0 && rep.labels.count() == 3 {
            out.check(Check::at_least(
                tag("verdicts", n, multi),
                verdict_mismatches(&rep.verdicts(), &[Verdict::NotInZ; 3]),
            ));
            let middle = rep.labels.mask(g, 1).indicator();
            let (u, lr) = solve_ladder(g, v, &middle, &cfg.ladder, opts)?;
            out.track(&lr);
            let alt = check_alternative(&u, &r.zeta1, rep, cfg.tolerances.tau_pos, cfg.tolerances.tau_zero);
            let want = [Sign::Zero, Sign::Positive, Sign::Zero];
            let bad = alt.signs().iter().zip(want).filter(|(a, b)| **a != *b).count();
            out.check(Check::at_least(tag("middle-alternative", n, multi), -(bad as f64)));
            out.file(
                subdir(n, multi).join("verdicts_middle.csv"),
                crate::principles::verdict_csv(&[("middle", &alt)]),
            );
        }
    }
    Ok(())
}

fn obstacle_checks(cfg: &ExperimentConfig, runs: &[Resolution], opts: &SolveOptions, out: &mut Outcome) -> Result<()> {
    let multi = runs.len() > 1;
    let alpha = match cfg.potential {
        Potential::DistanceToSet { alpha, .. } => alpha,
        _ => unreachable!("obstacle preset uses a distance potential"),
    };
    let mut defects = Vec::new();
    for r in runs {
        let (g, n) = (&r.grid, r.n);
        let rep = &r.zeroset;
        let top = rep.components.iter().map(|c| c.defect).fold(0.0, f64::max);
        let low = rep.components.iter().map(|c| c.defect).fold(f64::INFINITY, f64::min);
        defects.push(top);
        if (1.0..2.0).contains(&alpha) {
            out.check(Check::strictly(tag("in-z", n, multi), low - rep.thresholds.tau_z));
            out.check(Check::at_least(tag("z-is-everything", n, multi), rep.z.count() as f64 - g.len() as f64));
        } else if alpha >= 2.0 {
            out.check(Check::at_least(tag("not-in-z", n, multi), rep.thresholds.tau_z - top));
            let far = rep
                .z
                .indices()
                .map(|i| OBSTACLE.distance_to_closure(g.node(i)))
                .fold(0.0, f64::max);
            out.check(Check::at_least(tag("z-near-obstacle", n, multi), 2.0 * g.h() - far));
            let o = orthogonality(g, &cfg.potential, &rep.z, &cfg.ladder, opts)?;
            let theta = torsion(g, opts)?.0.linf();
            let bound = 1e-3 * UNIT_DISK.measure() * theta;
            out.check(Check::at_least(tag("orthogonality", n, multi), bound - o.off_z_on_z.max(o.on_z_off_z)));
        }
        out.note(format!("n={n} max_defect={top}"));
    }
    if multi {
        if (1.0..2.0).contains(&alpha) {
            let drift = defects.windows(2).map(|w| relative(w[0], w[1])).fold(0.0, f64::max);
            out.check(Check::at_least("defect-stable", 0.1 - drift));
        } else if alpha >= 2.0 {
            let dec = defects.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
            out.check(Check::strictly("defect-decreasing", dec));
        }
    }
    Ok(())
}

/// Regime predicted by the sign and integrability of `|x|^{−α}`.
pub fn expected_regime(alpha: f64) -> OnedRegime {
    if alpha < 1.0 {
        OnedRegime::ZEmpty
    } else if alpha < 2.0 {
        OnedRegime::ZEverything
    } else {
        OnedRegime::ZPoint
    }
}

pub const HOPF_SWEEP: [f64; 6] = [1.0, 1.5, 1.9, 2.0, 2.5, 3.0];

fn oned_sweep(ov: &Overrides, opts: &SolveOptions) -> Result<Outcome> {
    let cfg = preset_config(Preset::OnedSweep, ov)?;
    let mut out = Outcome::new(Preset::OnedSweep.name(), Preset::OnedSweep.statement());
    let alphas: Vec<f64> = ov.alpha.map_or_else(|| vec![0.5, 1.5, 2.5], |a| vec![a]);
    let mut table = String::from("alpha,n,nodes,grid_regime,quadrature_regime,mismatch,s_nodes,max_defect\n");
    for &alpha in &alphas {
        for &n in &cfg.resolutions {
            let c = oned_regime_classifier(alpha, &cfg.ladder, n, opts)?;
            let name = |s: &str| format!("{s}@alpha{alpha}@n{n}");
            let want = expected_regime(alpha);
            out.check(Check::at_least(name("regime"), if c.regime == want { 0.0 } else { -1.0 }));
            out.check(Check::at_least(name("consistent"), if c.mismatch { -1.0 } else { 0.0 }));
            if want == OnedRegime::ZPoint {
                let m = if c.report.labels.count() == 2 { 0.0 } else { -1.0 };
                out.check(Check::at_least(name("two-components"), m));
            }
            for comp in &c.report.components {
                out.track(&comp.ladder);
            }
            let max_defect = c.report.components.iter().map(|x| x.defect).fold(0.0, f64::max);
            let _ = writeln!(
                table,
                "{alpha},{n},{},{},{},{},{},{max_defect}",
                c.n,
                c.grid_regime.map_or("inconclusive", |r| r.as_str()),
                c.quadrature_regime,
                c.mismatch,
                c.report.s.count()
            );
            let grid = build_grid(DomainSpec::interval(-1.0, 1.0, c.n))?;
            out.file(format!("torsion_alpha{alpha}_n{n}.csv"), grid.field_csv(&c.zeta1)?);
        }
    }
    let mut hopf_csv = String::from("alpha,diverges,value\n");
    let mut sweep: Vec<f64> = HOPF_SWEEP.to_vec();
    for a in &alphas {
        if !sweep.contains(a) {
            sweep.push(*a);
        }
    }
    let mut diverges_at = Vec::new();
    for &a in &sweep {
        let r = hopf_criterion_1d(&Potential::point([0.0, 0.0], a), 0.0, 0.5)?;
        let ok = r.diverges == (a >= 2.0);
        out.check(Check::at_least(format!("hopf@alpha{a}"), if ok { 0.0 } else { -1.0 }));
        let _ = writeln!(hopf_csv, "{a},{},{}", r.diverges, r.value.map_or(String::new(), |v| v.to_string()));
        diverges_at.push((a, r.diverges));
    }
    let at = |x: f64| diverges_at.iter().find(|(a, _)| *a == x).map(|p| p.1);
    let flips = at(1.9) == Some(false) && at(2.0) == Some(true);
    out.check(Check::at_least("hopf-flip-1.9-2.0", if flips { 0.0 } else { -1.0 }));
    out.file("oned.csv", table);
    out.file("hopf.csv", hopf_csv);
    Ok(out)
}

fn invariants(ov: &Overrides, opts: &SolveOptions) -> Result<Outcome> {
    let mut out = Outcome::new("invariants", "solver and estimate invariants");
    let resolutions = ov.resolutions.clone().unwrap_or_else(|| vec![33]);
    let n = resolutions[0];
    let ladder = preset_config(Preset::ExamplePoint, ov)?.ladder;

    let line = build_grid(DomainSpec::interval(-1.0, 1.0, n))?;
    let (theta, _) = torsion(&line, opts)?;
    let err = line.nodes().iter().zip(theta.values()).map(|(p, v)| (v - 0.5 * (1.0 - p[0] * p[0])).abs()).fold(0.0, f64::max);
    out.check(Check::at_least("torsion-interval", 1e-9 - err));

    for &m in &resolutions {
        let disk = build_grid(DomainSpec::new(UNIT_DISK, m))?;
        let (theta, _) = torsion(&disk, opts)?;
        let name = tag("torsion-disk", m, resolutions.len() > 1);
        out.check(Check::at_least(name, 3.0 * disk.h() - (theta.max() - 0.25).abs()));
    }

    let g = green_function(&line, &Potential::Zero, [0.0, 0.0], &ladder, opts)?;
    let err = line.nodes().iter().zip(g.field.values()).map(|(p, v)| (v - 0.5 * (1.0 - p[0].abs())).abs()).fold(0.0, f64::max);
    out.check(Check::at_least("green-triangle", 1e-9 - err));

    let disk = build_grid(DomainSpec::new(UNIT_DISK, n))?;
    let point = Potential::point([0.0, 0.0], 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let f = disk.field(disk.nodes().iter().map(|_| rng.gen::<f64>()).collect())?;
        let data = MeasureData::from_density(f.clone());
        let (u, rep) = solve_ladder(&disk, &point, &f, &ladder, opts)?;
        out.track(&rep);
        let est = verify_estimates(&disk, &point, &data, &u, &rep, opts)?;
        worst = worst.min(est.domination_margin.unwrap_or(0.0));
    }
    out.check(Check::at_least("domination-random", worst + 1e-8));

    let (_, rep) = solve_ladder(&disk, &point, &disk.constant(1.0), &ladder, opts)?;
    out.check(Check::at_least("ladder-monotone", 10.0 * opts.rel_tol - rep.monotone_violation));

    let f = disk.field_from_fn(|p| 1.0 + p[0]);
    let h = disk.field_from_fn(|p| (3.0 * p[1]).cos().abs());
    let (zf, _) = solve_truncated(&disk, &point, &f, 1e4, opts)?;
    let (zh, _) = solve_truncated(&disk, &point, &h, 1e4, opts)?;
    let a = disk.integrate(&zf.zip_map(&h, |x, y| x * y)?)?;
    let b = disk.integrate(&zh.zip_map(&f, |x, y| x * y)?)?;
    out.check(Check::at_least("duality-identity", 1e-8 * a.abs().max(1e-12) - (a - b).abs()));

    let params = ComparisonParams::new(2.0, theta.linf())?;
    let mut prev = 0.0;
    let mut sweep_margin: f64 = 0.0;
    for i in 0..1000 {
        let v = comparison_h(i as f64 * 2e-3, &params)?;
        sweep_margin = sweep_margin.min(v - prev).min(params.bound() - v);
        prev = v;
    }
    out.check(Check::at_least("h-monotone-bounded", sweep_margin));

    let atom = [0.2, -0.1];
    let delta = MeasureData::dirac(atom, 1.0);
    let smooth = MeasureData::dirac(atom, 1.0).mollified(vec![3.0 * disk.h()]);
    let (ud, _) = solve_measure(&disk, &Potential::Zero, &delta, &ladder, opts)?;
    let (us, _) = solve_measure(&disk, &Potential::Zero, &smooth, &ladder, opts)?;
    let gap = disk.norms(&ud.lin_comb(1.0, &us, -1.0)?)?.l1;
    out.check(Check::at_least("mollified-vs-delta", 0.05 * disk.norms(&ud)?.l1 - gap));
    Ok(out)
}

fn verify_all(ov: &Overrides, opts: &SolveOptions) -> Result<Outcome> {
    let inner = Overrides { out: None, ..ov.clone() };
    let presets = [Preset::ExamplePoint, Preset::ExampleTwin, Preset::ExampleObstacle, Preset::OnedSweep];
    let mut with_defaults = inner.clone();
    if with_defaults.resolutions.is_none() {
        with_defaults.resolutions = Some(Preset::VerifyAll.default_resolutions());
    }
    let results: Vec<Result<Outcome>> = presets
        .par_iter()
        .map(|&p| run_preset(p, &with_defaults, opts))
        .chain(rayon::iter::once(invariants(&with_defaults, opts)))
        .collect();
    let mut out = Outcome::new(Preset::VerifyAll.name(), Preset::VerifyAll.statement());
    let names = presets.iter().map(|p| p.name()).chain(std::iter::once("invariants"));
    for (name, r) in names.zip(results) {
        out.absorb(name, r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_names_every_preset() {
        let text = list_presets();
        for p in Preset::ALL {
            assert!(text.contains(p.name()));
        }
        assert!(text.contains("example-twin") && text.contains("oned-sweep"));
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("example-nothing".parse::<Preset>().is_err());
    }

    #[test]
    fn overrides_reach_the_config() {
        let ov = Overrides {
            resolutions: Some(vec![17]),
            alpha: Some(2.5),
            ladder: Some((2.0, 4.0, 6)),
            tau_z: Some(0.05),
            ..Overrides::default()
        };
        let cfg = preset_config(Preset::ExamplePoint, &ov).unwrap();
        assert_eq!(cfg.resolutions, vec![17]);
        assert_eq!(cfg.ladder.k_values()[1], 8.0);
        assert_eq!(cfg.thresholds.tau_z, 0.05);
        assert_eq!(cfg.potential.to_string(), "point 0 0 alpha=2.5");
    }

    #[test]
    fn expected_regimes() {
        assert_eq!(expected_regime(0.5), OnedRegime::ZEmpty);
        assert_eq!(expected_regime(1.0), OnedRegime::ZEverything);
        assert_eq!(expected_regime(2.0), OnedRegime::ZPoint);
    }
}
