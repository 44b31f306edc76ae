//! Comparison principle, the per-component positivity alternative and the
//! one-dimensional Hopf criterion.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::grid::{build_grid, DomainKind, DomainSpec, Field, Grid};
use crate::linsolve::SolveOptions;
use crate::potential::{Potential, TruncationLadder};
use crate::schrodinger::{solve_ladder, solve_measure, torsion, LadderReport, MeasureData};
use crate::zeroset::{analyze, Verdict, ZeroSetReport, ZeroSetThresholds};

/// Parameters of `H(t) = ((α−1)/(Cα)) · min{t^α, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonParams {
    pub alpha: f64,
    pub c: f64,
}

impl ComparisonParams {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("comparison exponent {alpha} must exceed 1")));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("comparison constant {c} must be positive")));
        }
        Ok(ComparisonParams { alpha, c })
    }

    /// `α` with `C = ‖θ‖∞` taken from the torsion function of `grid`.
    pub fn from_torsion(grid: &Grid, alpha: f64, opts: &SolveOptions) -> Result<Self> {
        let (theta, _) = torsion(grid, opts)?;
        Self::new(alpha, theta.linf())
    }

    /// Supremum of `H`.
    pub fn bound(&self) -> f64 {
        (self.alpha - 1.0) / (self.c * self.alpha)
    }
}

pub fn comparison_h(t: f64, params: &ComparisonParams) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("H is defined for t >= 0, got {t}")));
    }
    Ok(params.bound() * t.powf(params.alpha).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// `min (u − ζ_{H(u)})` over all nodes.
    pub margin: f64,
    pub u_max: f64,
    pub u: Field,
    pub w: Field,
    pub u_ladder: LadderReport,
    pub w_ladder: LadderReport,
}

/// Solves for `u` with datum `μ`, then for `w = ζ_{H(u)}`, and reports
/// `min (u − w)`.
pub fn check_comparison(
    grid: &Grid,
    potential: &Potential,
    data: &MeasureData,
    ladder: &TruncationLadder,
    params: &ComparisonParams,
    opts: &SolveOptions,
) -> Result<ComparisonReport> {
    let (u, u_ladder) = solve_measure(grid, potential, data, ladder, opts)?;
    // roundoff can leave values like -1e-20 in u
    let hu = u.map(|t| params.bound() * t.max(0.0).powf(params.alpha).min(1.0));
    let (w, w_ladder) = solve_ladder(grid, potential, &hu, ladder, opts)?;
    let margin = u
        .values()
        .iter()
        .zip(w.values())
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min);
    Ok(ComparisonReport { margin, u_max: u.max(), u, w, u_ladder, w_ladder })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sign {
    Positive,
    Zero,
    Violation { min: f64, max: f64 },
}

impl Sign {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sign::Positive => "positive",
            Sign::Zero => "zero",
            Sign::Violation { .. } => "violation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentSign {
    pub label: usize,
    pub sign: Sign,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternativeVerdict {
    pub components: Vec<ComponentSign>,
    pub tau_pos: f64,
    pub tau_zero: f64,
}

impl AlternativeVerdict {
    pub fn signs(&self) -> Vec<Sign> {
        self.components.iter().map(|c| c.sign).collect()
    }

    pub fn has_violation(&self) -> bool {
        self.components.iter().any(|c| matches!(c.sign, Sign::Violation { .. }))
    }
}

/// Positive / zero / violation per component of `Ω∖S`. A component is zero
/// when `max u < τ_zero · max_Ω u`; it is positive when `u/ζ₁` stays above
/// `τ_pos` times its mean over the component. The ratio removes the decay
/// that `u` and `ζ₁` share next to a strong singularity; the mean, unlike
/// the maximum, stays bounded for atomic data.
pub fn check_alternative(
    u: &Field,
    zeta1: &Field,
    report: &ZeroSetReport,
    tau_pos: f64,
    tau_zero: f64,
) -> AlternativeVerdict {
    let top = u.max();
    let components = (0..report.labels.count())
        .map(|label| {
            let nodes = report.labels.nodes(label);
            let min = nodes.iter().map(|&i| u.get(i)).fold(f64::INFINITY, f64::min);
            let max = nodes.iter().map(|&i| u.get(i)).fold(f64::NEG_INFINITY, f64::max);
            let ratio = |i: usize| u.get(i) / zeta1.get(i);
            let low = nodes.iter().map(|&i| ratio(i)).fold(f64::INFINITY, f64::min);
            let mean = nodes.iter().map(|&i| ratio(i)).sum::<f64>() / nodes.len() as f64;
            let sign = if top <= 0.0 || max < tau_zero * top {
                Sign::Zero
            } else if low > tau_pos * mean {
                Sign::Positive
            } else {
                Sign::Violation { min, max }
            };
            ComponentSign { label, sign, min, max }
        })
        .collect();
    AlternativeVerdict { components, tau_pos, tau_zero }
}

/// Verdict CSV `experiment,component,verdict,min,max`.
pub fn verdict_csv(rows: &[(&str, &AlternativeVerdict)]) -> String {
    let mut s = String::from("experiment,component,verdict,min,max\n");
    for (name, v) in rows {
        for c in &v.components {
            let _ = writeln!(s, "{},{},{},{},{}", name, c.label, c.sign.as_str(), c.min, c.max);
        }
    }
    s
}

/// Dyadic shell sums of `∫ V(x) |x−c|^p dx` toward `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellTest {
    /// Shell `j` covers `[c + L·2^{−j−1}, c + L·2^{−j}]`.
    pub shells: Vec<f64>,
    pub diverges: bool,
    /// Sum of the shells plus a geometric tail; `None` when divergent.
    pub value: Option<f64>,
}

pub const SHELL_COUNT: usize = 41;
/// Relative slack when comparing consecutive shell sums.
pub const SHELL_RATIO_TOL: f64 = 1e-9;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        Some(left + right + delta / 15.0)
    } else if depth == 0 {
        None
    } else {
        Some(
            adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
                + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
        )
    }
}

/// Adaptive Simpson; `None` when the refinement budget runs out, which
/// happens at non-integrable singularities inside `[a, b]`.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Option<f64> {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    let tol = 1e-11 * whole.abs().max(1e-300);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 40)
}

fn shell_test(potential: &Potential, c: f64, l: f64, power: f64) -> Result<ShellTest> {
    if !(l.abs() > 0.0) || !l.is_finite() || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("half-length {l} must be nonzero and finite")));
    }
    let integrand = |x: f64| potential.eval([x, 0.0]) * (x - c).abs().powf(power);
    let mut shells = Vec::with_capacity(SHELL_COUNT);
    for j in 0..SHELL_COUNT {
        let a = c + l * 0.5f64.powi(j as i32 + 1);
        let b = c + l * 0.5f64.powi(j as i32);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let s = integrate(integrand, lo, hi).unwrap_or(f64::INFINITY);
        if !s.is_finite() || s < 0.0 {
            return Err(Error::Configuration(format!(
                "potential is not integrable on [{lo}, {hi}], away from the endpoint {c}"
            )));
        }
        shells.push(s);
    }
    let last = &shells[SHELL_COUNT - 5..];
    let diverges = last[4] > 0.0
        && last.windows(2).all(|w| w[1] >= w[0] * (1.0 - SHELL_RATIO_TOL));
    let value = if diverges {
        None
    } else {
        let sum: f64 = shells.iter().sum();
        let (p, q) = (shells[SHELL_COUNT - 2], shells[SHELL_COUNT - 1]);
        let tail = if p > 0.0 && q < p { q * (q / p) / (1.0 - q / p) } else { 0.0 };
        Some(sum + tail)
    };
    Ok(ShellTest { shells, diverges, value })
}

/// Tests `∫_c^{c+L} V(x)(x−c) dx` for divergence with the dyadic shell
/// ratio test. A negative `L` integrates to the left of `c`.
pub fn hopf_criterion_1d(potential: &Potential, c: f64, l: f64) -> Result<ShellTest> {
    shell_test(potential, c, l, 1.0)
}

/// Same shells for `∫_c^{c+L} V(x) dx`; divergence means `V ∉ L¹` near `c`.
pub fn local_integrability_1d(potential: &Potential, c: f64, l: f64) -> Result<ShellTest> {
    shell_test(potential, c, l, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnedRegime {
    /// `V ∈ L¹`: every solution is positive, `Z = ∅`.
    ZEmpty,
    /// Hopf integral converges: only trivial solutions, `Z = Ω`.
    ZEverything,
    /// Hopf integral diverges: the two sides decouple, `Z = {0}`.
    ZPoint,
}

impl OnedRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            OnedRegime::ZEmpty => "Z_empty",
            OnedRegime::ZEverything => "Z_everything",
            OnedRegime::ZPoint => "Z_point",
        }
    }
}

impl fmt::Display for OnedRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnedClassification {
    pub alpha: f64,
    /// Joint verdict; the grid verdict unless it was inconclusive.
    pub regime: OnedRegime,
    /// `None` when the components disagree with each other.
    pub grid_regime: Option<OnedRegime>,
    pub quadrature_regime: OnedRegime,
    pub mismatch: bool,
    /// Node count of the 1D grid actually used.
    pub n: usize,
    pub zeta1: Field,
    pub report: ZeroSetReport,
    pub hopf: ShellTest,
    pub integrability: ShellTest,
}

/// Odd node count used by the 1D classifier for a nominal resolution `n`:
/// eight times finer, so that `0` is a node and the defect of a decoupling
/// potential has decayed below `τ_Z`.
pub fn oned_resolution(n: usize) -> usize {
    let n = n.max(3);
    let n = if n.is_multiple_of(2) { n + 1 } else { n };
    8 * (n - 1) + 1
}

/// Classifies `V = |x|^{−α}` on `(−1, 1)` from the grid zero-set analysis
/// and from the shell quadratures, and flags disagreement.
pub fn oned_regime_classifier(
    alpha: f64,
    ladder: &TruncationLadder,
    n: usize,
    opts: &SolveOptions,
) -> Result<OnedClassification> {
    let potential = Potential::point([0.0, 0.0], alpha);
    let m = oned_resolution(n);
    let grid = build_grid(DomainSpec::new(DomainKind::Interval { a: -1.0, b: 1.0 }, m))?;
    let (zeta1, _, report) = analyze(&grid, &potential, ladder, opts, &ZeroSetThresholds::default())?;

    let grid_regime = if report.s.count() == 0 {
        Some(OnedRegime::ZEmpty)
    } else {
        let v = report.verdicts();
        if v.iter().all(|&x| x == Verdict::InZ) {
            Some(OnedRegime::ZEverything)
        } else if v.iter().all(|&x| x == Verdict::NotInZ) {
            Some(OnedRegime::ZPoint)
        } else {
            None
        }
    };

    let integrability = local_integrability_1d(&potential, 0.0, 0.5)?;
    let hopf = hopf_criterion_1d(&potential, 0.0, 0.5)?;
    let quadrature_regime = if !integrability.diverges {
        OnedRegime::ZEmpty
    } else if hopf.diverges {
        OnedRegime::ZPoint
    } else {
        OnedRegime::ZEverything
    };

    Ok(OnedClassification {
        alpha,
        regime: grid_regime.unwrap_or(quadrature_regime),
        grid_regime,
        quadrature_regime,
        mismatch: grid_regime != Some(quadrature_regime),
        n: m,
        zeta1,
        report,
        hopf,
        integrability,
    })
}
