//! Truncation-ladder solutions of `−Δu + Vu = μ`.
//!
//! Each rung solves the bounded problem with `T_k(V)`; for nonnegative data
//! the rung solutions decrease in `k` and their limit is the duality
//! solution. Measure data is a density field plus weighted atoms.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Point};
use crate::linsolve::{cg_solve, cg_solve_from, SolveOptions, SolveStats};
use crate::potential::{Potential, TruncationLadder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: Point,
    pub weight: f64,
}

/// How atoms are placed on the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Mollification {
    /// `weight / h^N` at the nearest node.
    DiscreteDelta,
    /// Normalised bump `(1 − |y−x|²/r²)²`; rung `j` uses `radii[min(j, len−1)]`.
    Mollified { radii: Vec<f64> },
}

/// A finite nonnegative measure `f dx + Σ w_i δ_{x_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureData {
    pub density: Option<Field>,
    pub atoms: Vec<Atom>,
    pub mollification: Mollification,
}

impl MeasureData {
    pub fn zero() -> Self {
        MeasureData { density: None, atoms: Vec::new(), mollification: Mollification::DiscreteDelta }
    }

    pub fn from_density(f: Field) -> Self {
        MeasureData { density: Some(f), ..Self::zero() }
    }

    pub fn dirac(location: Point, weight: f64) -> Self {
        MeasureData { atoms: vec![Atom { location, weight }], ..Self::zero() }
    }

    pub fn with_atom(mut self, location: Point, weight: f64) -> Self {
        self.atoms.push(Atom { location, weight });
        self
    }

    pub fn mollified(mut self, radii: Vec<f64>) -> Self {
        self.mollification = Mollification::Mollified { radii };
        self
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if let Some(f) = &self.density {
            grid.check(f)?;
            if f.values().iter().any(|&v| v < 0.0) {
                return Err(Error::InvalidMeasure("density must be nonnegative".into()));
            }
        }
        for a in &self.atoms {
            if !(a.weight > 0.0) || !a.weight.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom weight {} must be > 0", a.weight)));
            }
            if !grid.contains(a.location) {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {:?} lies outside the domain",
                    a.location
                )));
            }
        }
        if let Mollification::Mollified { radii } = &self.mollification {
            if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
                return Err(Error::InvalidMeasure("mollifier radii must be positive".into()));
            }
        }
        Ok(())
    }

    /// `∫ f + Σ w_i` with the node-sum quadrature.
    pub fn total_mass(&self, grid: &Grid) -> Result<f64> {
        let dens = match &self.density {
            Some(f) => grid.integrate(f)?,
            None => 0.0,
        };
        Ok(dens + self.atoms.iter().map(|a| a.weight).sum::<f64>())
    }

    /// `‖f‖∞` when the measure is absolutely continuous.
    pub fn density_sup(&self) -> Option<f64> {
        if !self.atoms.is_empty() {
            return None;
        }
        Some(self.density.as_ref().map_or(0.0, Field::linf))
    }

    /// Discrete right-hand side used at ladder rung `rung`.
    pub fn rhs(&self, grid: &Grid, rung: usize) -> Result<Field> {
        self.validate(grid)?;
        let mut b = match &self.density {
            Some(f) => f.values().to_vec(),
            None => vec![0.0; grid.len()],
        };
        let vol = grid.cell_volume();
        for a in &self.atoms {
            let radius = match &self.mollification {
                Mollification::DiscreteDelta => None,
                Mollification::Mollified { radii } => Some(radii[rung.min(radii.len() - 1)]),
            };
            let bump: Vec<(usize, f64)> = match radius {
                None => Vec::new(),
                Some(r) => grid
                    .nodes()
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &y)| {
                        let t = grid.point_distance(y, a.location) / r;
                        (t < 1.0).then(|| (i, (1.0 - t * t).powi(2)))
                    })
                    .collect(),
            };
            let mass: f64 = bump.iter().map(|(_, v)| v).sum::<f64>() * vol;
            if mass > 0.0 {
                for (i, v) in bump {
                    b[i] += a.weight * v / mass;
                }
            } else {
                b[grid.nearest_node(a.location)] += a.weight / vol;
            }
        }
        grid.field(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RungRecord {
    pub k: f64,
    /// Relative L¹ change to the previous rung; `None` on the first rung.
    pub l1_change: Option<f64>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderReport {
    pub rungs: Vec<RungRecord>,
    pub converged: bool,
    /// `max (u_{k+1} − u_k)⁺` over nodes and consecutive rungs.
    pub monotone_violation: f64,
}

impl LadderReport {
    pub fn final_k(&self) -> f64 {
        self.rungs.last().map_or(0.0, |r| r.k)
    }

    /// Whether every inner CG solve met its tolerance.
    pub fn solver_converged(&self) -> bool {
        self.rungs.iter().all(|r| r.stats.converged)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("rung,k,l1_change,cg_iters,residual\n");
        for (i, r) in self.rungs.iter().enumerate() {
            let change = r.l1_change.map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                i + 1,
                r.k,
                change,
                r.stats.iterations,
                r.stats.relative_residual
            );
        }
        s
    }
}

/// `ζ_{f,k}`: the solution with the truncated potential `T_k(V)`.
pub fn solve_truncated(
    grid: &Grid,
    potential: &Potential,
    f: &Field,
    k: f64,
    opts: &SolveOptions,
) -> Result<(Field, SolveStats)> {
    let w = potential.truncate_to_field(grid, k)?;
    cg_solve(grid, &w, f, opts)
}

/// Torsion function `θ` of the plain Laplacian.
pub fn torsion(grid: &Grid, opts: &SolveOptions) -> Result<(Field, SolveStats)> {
    cg_solve(grid, &grid.zeros(), &grid.constant(1.0), opts)
}

fn relative_l1_change(prev: &[f64], next: &[f64]) -> f64 {
    let diff: f64 = prev.iter().zip(next).map(|(a, b)| (a - b).abs()).sum();
    let size: f64 = next.iter().map(|v| v.abs()).sum();
    if diff == 0.0 {
        0.0
    } else if size == 0.0 {
        f64::INFINITY
    } else {
        diff / size
    }
}

fn run_ladder(
    grid: &Grid,
    potential: &Potential,
    rhs: impl Fn(usize) -> Result<Field>,
    ladder: &TruncationLadder,
    opts: &SolveOptions,
) -> Result<(Field, LadderReport)> {
    let samples = potential.sample(grid);
    let mut rungs = Vec::new();
    let mut monotone_violation: f64 = 0.0;
    let mut prev: Option<Field> = None;
    let mut converged = false;
    for (j, &k) in ladder.k_values().iter().enumerate() {
        let w = grid.field(
            samples.iter().map(|&v| if v.is_nan() { 0.0 } else { v.clamp(0.0, k) }).collect(),
        )?;
        let b = rhs(j)?;
        let (u, stats) = cg_solve_from(grid, &w, &b, prev.as_ref(), opts)?;
        let l1_change = prev.as_ref().map(|p| {
            for (a, b) in p.values().iter().zip(u.values()) {
                monotone_violation = monotone_violation.max(b - a);
            }
            relative_l1_change(p.values(), u.values())
        });
        rungs.push(RungRecord { k, l1_change, stats });
        prev = Some(u);
        if l1_change.is_some_and(|c| c <= ladder.stop_tol()) {
            converged = true;
            break;
        }
    }
    let u = prev.expect("ladder has at least one rung");
    Ok((u, LadderReport { rungs, converged, monotone_violation }))
}

/// `ζ_f` as the limit of the truncation ladder, for `f ≥ 0`.
pub fn solve_ladder(
    grid: &Grid,
    potential: &Potential,
    f: &Field,
    ladder: &TruncationLadder,
    opts: &SolveOptions,
) -> Result<(Field, LadderReport)> {
    grid.check(f)?;
    if f.values().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidArgument("ladder data must be nonnegative".into()));
    }
    run_ladder(grid, potential, |_| Ok(f.clone()), ladder, opts)
}

/// Duality solution for a nonnegative finite measure.
pub fn solve_measure(
    grid: &Grid,
    potential: &Potential,
    data: &MeasureData,
    ladder: &TruncationLadder,
    opts: &SolveOptions,
) -> Result<(Field, LadderReport)> {
    data.validate(grid)?;
    run_ladder(grid, potential, |j| data.rhs(grid, j), ladder, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    /// `‖μ‖ − ‖T_K(V) u‖₁`.
    pub absorption_margin: f64,
    /// `‖u‖_{W^{1,1}} / ‖μ‖` with forward differences; `None` for `μ = 0`.
    pub sobolev_ratio: Option<f64>,
    /// `min (‖f‖∞ ζ₁ − |u|)`; `None` when the measure has atoms.
    pub domination_margin: Option<f64>,
}

/// Discrete `W^{1,1}` norm: `‖u‖₁ + h^N Σ |forward differences| / h`.
pub fn w11_norm(grid: &Grid, u: &Field) -> Result<f64> {
    grid.check(u)?;
    let vals = u.values();
    let mut grad = 0.0;
    for idx in 0..grid.len() {
        let nb = grid.neighbors(idx);
        // right and up neighbours; the left and down boundary edges are
        // counted from the boundary side
        for (slot, m) in nb.iter().enumerate() {
            match (slot % 2, m) {
                (1, Some(m)) => grad += (vals[*m] - vals[idx]).abs(),
                (_, None) => grad += vals[idx].abs(),
                _ => {}
            }
        }
    }
    Ok(grid.norms(u)?.l1 + grid.cell_volume() * grad / grid.h())
}

/// Absorption, Sobolev and torsion-domination estimates for a ladder
/// solution `u` of the data `data`.
pub fn verify_estimates(
    grid: &Grid,
    potential: &Potential,
    data: &MeasureData,
    u: &Field,
    report: &LadderReport,
    opts: &SolveOptions,
) -> Result<EstimateReport> {
    let k = report.final_k();
    let w = potential.truncate_to_field(grid, k)?;
    let mass = data.total_mass(grid)?;
    let absorption_margin = mass - grid.l1_weighted(u, &w)?;
    let sobolev_ratio = if mass > 0.0 { Some(w11_norm(grid, u)? / mass) } else { None };
    let domination_margin = match data.density_sup() {
        Some(sup) => {
            let (zeta1, _) = cg_solve(grid, &w, &grid.constant(1.0), opts)?;
            let m = zeta1
                .values()
                .iter()
                .zip(u.values())
                .map(|(z, v)| sup * z - v.abs())
                .fold(f64::INFINITY, f64::min);
            Some(m)
        }
        None => None,
    };
    Ok(EstimateReport { absorption_margin, sobolev_ratio, domination_margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn bounded_potential_converges_at_second_rung() {
        let g = build_grid(DomainSpec::interval(-1.0, 1.0, 17)).unwrap();
        let v = Potential::Constant(0.5);
        let ladder = TruncationLadder::default();
        let (u, rep) = solve_ladder(&g, &v, &g.constant(1.0), &ladder, &opts()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.rungs.len(), 2);
        assert_eq!(rep.rungs[1].l1_change, Some(0.0));
        let (direct, _) = solve_truncated(&g, &v, &g.constant(1.0), 1.0, &opts()).unwrap();
        assert_eq!(u, direct);
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, 17)).unwrap();
        let v = Potential::point([0.0, 0.0], 3.0);
        let (u, rep) = solve_ladder(&g, &v, &g.zeros(), &TruncationLadder::default(), &opts()).unwrap();
        assert!(u.values().iter().all(|&x| x == 0.0));
        assert!(rep.converged);
        let (z, _) = solve_truncated(&g, &v, &g.zeros(), 10.0, &opts()).unwrap();
        assert!(z.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn negative_data_rejected() {
        let g = build_grid(DomainSpec::interval(-1.0, 1.0, 5)).unwrap();
        let f = g.field(vec![1.0, -1.0, 1.0]).unwrap();
        assert!(solve_ladder(&g, &Potential::Zero, &f, &TruncationLadder::default(), &opts()).is_err());
    }

    #[test]
    fn torsion_matches_parabola() {
        let g = build_grid(DomainSpec::interval(-1.0, 1.0, 33)).unwrap();
        let (theta, _) = torsion(&g, &opts()).unwrap();
        for (p, v) in g.nodes().iter().zip(theta.values()) {
            assert!((v - 0.5 * (1.0 - p[0] * p[0])).abs() < 1e-10);
        }
        assert!((theta.linf() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn unit_atom_gives_triangle() {
        let g = build_grid(DomainSpec::interval(-1.0, 1.0, 17)).unwrap();
        let mu = MeasureData::dirac([0.0, 0.0], 1.0);
        let (u, _) = solve_measure(&g, &Potential::Zero, &mu, &TruncationLadder::default(), &opts()).unwrap();
        for (p, v) in g.nodes().iter().zip(u.values()) {
            assert!((v - 0.5 * (1.0 - p[0].abs())).abs() < 1e-10);
        }
        let (u2, _) = solve_measure(
            &g,
            &Potential::Zero,
            &MeasureData::dirac([0.0, 0.0], 2.0),
            &TruncationLadder::default(),
            &opts(),
        )
        .unwrap();
        for (a, b) in u.values().iter().zip(u2.values()) {
            assert!((2.0 * a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn atom_outside_rejected() {
        let g = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, 9)).unwrap();
        let mu = MeasureData::dirac([1.5, 0.0], 1.0);
        assert!(matches!(
            solve_measure(&g, &Potential::Zero, &mu, &TruncationLadder::default(), &opts()),
            Err(Error::InvalidMeasure(_))
        ));
    }

    #[test]
    fn mollified_atom_keeps_mass() {
        let g = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, 33)).unwrap();
        let mu = MeasureData::dirac([0.1, 0.2], 1.5).mollified(vec![3.0 * g.h()]);
        let b = mu.rhs(&g, 0).unwrap();
        assert!((g.integrate(&b).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(mu.total_mass(&g).unwrap(), 1.5);
    }

    #[test]
    fn estimates_for_zero_and_free_cases() {
        let g = build_grid(DomainSpec::disk([0.0, 0.0], 1.0, 17)).unwrap();
        let ladder = TruncationLadder::default();
        let v = Potential::point([0.0, 0.0], 3.0);
        let mu = MeasureData::zero();
        let (u, rep) = solve_measure(&g, &v, &mu, &ladder, &opts()).unwrap();
        let est = verify_estimates(&g, &v, &mu, &u, &rep, &opts()).unwrap();
        assert_eq!(est.absorption_margin, 0.0);
        assert_eq!(est.domination_margin, Some(0.0));

        let one = MeasureData::from_density(g.constant(1.0));
        let (u, rep) = solve_measure(&g, &Potential::Zero, &one, &ladder, &opts()).unwrap();
        let est = verify_estimates(&g, &Potential::Zero, &one, &u, &rep, &opts()).unwrap();
        let area = g.cell_volume() * g.len() as f64;
        assert!((est.absorption_margin - area).abs() < 1e-12);
    }

    #[test]
    fn ladder_csv_layout() {
        let g = build_grid(DomainSpec::interval(-1.0, 1.0, 9)).unwrap();
        let (_, rep) =
            solve_ladder(&g, &Potential::Zero, &g.constant(1.0), &TruncationLadder::default(), &opts())
                .unwrap();
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("rung,k,l1_change,cg_iters,residual"));
        assert!(lines.next().unwrap().starts_with("1,1,,"));
        assert!(lines.next().unwrap().starts_with("2,2,0,0,"));
    }
}
