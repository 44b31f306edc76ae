//! Nonnegative potentials with values in `[0, +∞]`, their node sampling and
//! the truncation ladder `T_k(V)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{distance, DomainKind, Field, Grid, Point};

/// A Borel potential `V : Ω → [0, +∞]`.
#[derive(Clone)]
pub enum Potential {
    Zero,
    Constant(f64),
    /// `|x − center|^{−α}`.
    Point { center: Point, alpha: f64 },
    /// `|x_axis − offset|^{−α}` with `axis` 0 for x₁ and 1 for x₂.
    Hyperplane { axis: usize, offset: f64, alpha: f64 },
    Sum(Vec<Potential>),
    /// `d(x, closure(obstacle))^{−α}`.
    DistanceToSet { obstacle: DomainKind, alpha: f64 },
    /// `+∞` on the closed region, zero elsewhere.
    InfiniteOn(DomainKind),
    /// Node values on a grid; evaluation reads the nearest node.
    Tabulated(Arc<Grid>, Field),
    Custom(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential({self})")
    }
}

fn inverse_power(d: f64, alpha: f64) -> f64 {
    if d == 0.0 && alpha > 0.0 {
        f64::INFINITY
    } else {
        d.powf(-alpha)
    }
}

fn in_cell(x: f64, lo: f64, hi: f64) -> bool {
    lo <= x && x < hi
}

/// Mean of `|x|^{−α}` over the cell `[−h/2, h/2)^N` for `α < N`.
fn centred_cell_mean(alpha: f64, h: f64, dim: usize) -> f64 {
    let r = 0.5 * h;
    if dim == 1 {
        return r.powf(-alpha) / (1.0 - alpha);
    }
    // polar coordinates over the eight triangles of the square
    let m = 256;
    let step = std::f64::consts::FRAC_PI_4 / m as f64;
    let g = |phi: f64| phi.cos().powf(alpha - 2.0);
    let mut s = g(0.0) + g(std::f64::consts::FRAC_PI_4);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * step);
    }
    let angular = s * step / 3.0;
    8.0 * r.powf(2.0 - alpha) * angular / ((2.0 - alpha) * h * h)
}

impl Potential {
    pub fn point(center: Point, alpha: f64) -> Self {
        Potential::Point { center, alpha }
    }

    pub fn hyperplane(axis: usize, offset: f64, alpha: f64) -> Self {
        Potential::Hyperplane { axis, offset, alpha }
    }

    pub fn distance_to_set(obstacle: DomainKind, alpha: f64) -> Self {
        Potential::DistanceToSet { obstacle, alpha }
    }

    pub fn custom(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Potential::Custom(Arc::new(f))
    }

    /// Pointwise value; a zero distance under a positive exponent gives `+∞`.
    pub fn eval(&self, x: Point) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant(c) => *c,
            Potential::Point { center, alpha } => inverse_power(distance(x, *center), *alpha),
            Potential::Hyperplane { axis, offset, alpha } => {
                inverse_power((x[*axis] - offset).abs(), *alpha)
            }
            Potential::Sum(terms) => terms.iter().map(|t| t.eval(x)).sum(),
            Potential::DistanceToSet { obstacle, alpha } => {
                inverse_power(obstacle.distance_to_closure(x), *alpha)
            }
            Potential::InfiniteOn(region) => {
                if region.distance_to_closure(x) == 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Potential::Tabulated(grid, field) => field.get(grid.nearest_node(x)),
            Potential::Custom(f) => f(x),
        }
    }

    /// Value assigned to node `idx` of `grid` before truncation.
    ///
    /// Away from the singular set this is the pointwise value. A node whose
    /// dual cell contains a non-integrable singularity of `V` reads `+∞`; a
    /// node sitting exactly on an integrable singularity reads the cell mean.
    pub fn node_value(&self, grid: &Grid, idx: usize) -> f64 {
        let x = grid.node(idx);
        let (lo, hi) = grid.cell(idx);
        let h = grid.h();
        let dim = grid.dim();
        match self {
            Potential::Point { center, alpha } if *alpha > 0.0 => {
                let hit = (0..dim).all(|a| in_cell(center[a], lo[a], hi[a]))
                    && (dim == 2 || center[1] == 0.0);
                if !hit {
                    self.eval(x)
                } else if *alpha >= dim as f64 {
                    f64::INFINITY
                } else if grid.point_distance(x, *center) == 0.0 {
                    centred_cell_mean(*alpha, h, dim)
                } else {
                    self.eval(x)
                }
            }
            Potential::Hyperplane { axis, offset, alpha } if *alpha > 0.0 => {
                if *axis >= dim || !in_cell(*offset, lo[*axis], hi[*axis]) {
                    self.eval(x)
                } else if *alpha >= 1.0 {
                    f64::INFINITY
                } else if x[*axis] == *offset {
                    centred_cell_mean(*alpha, h, 1)
                } else {
                    self.eval(x)
                }
            }
            Potential::DistanceToSet { obstacle, alpha } if *alpha > 0.0 => {
                if obstacle.meets_box(lo, hi) {
                    f64::INFINITY
                } else {
                    self.eval(x)
                }
            }
            Potential::InfiniteOn(region) => {
                if region.meets_box(lo, hi) {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Potential::Sum(terms) => terms.iter().map(|t| t.node_value(grid, idx)).sum(),
            Potential::Tabulated(_, field) if field.spec() == grid.spec() => field.get(idx),
            _ => self.eval(x),
        }
    }

    /// Node samples of `V`, possibly `+∞`.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.len()).map(|i| self.node_value(grid, i)).collect()
    }

    /// `T_k(V)` on the nodes: samples clamped to `[0, k]`.
    pub fn truncate_to_field(&self, grid: &Grid, k: f64) -> Result<Field> {
        if !(k > 0.0) {
            return Err(Error::InvalidArgument(format!("truncation level k = {k} must be > 0")));
        }
        let values = (0..grid.len())
            .map(|i| {
                let v = self.node_value(grid, i);
                if v.is_nan() {
                    0.0
                } else {
                    v.clamp(0.0, k)
                }
            })
            .collect();
        grid.field(values)
    }

    /// Supremum of the node samples (`+∞` if any sample is infinite).
    pub fn sample_max(&self, grid: &Grid) -> f64 {
        self.sample(grid).into_iter().fold(0.0, f64::max)
    }
}

/// Increasing truncation levels with a relative L¹ stop tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationLadder {
    k_values: Vec<f64>,
    stop_tol: f64,
}

impl Default for TruncationLadder {
    fn default() -> Self {
        TruncationLadder::geometric(1.0, 2.0, 24, 1e-6).expect("default ladder is valid")
    }
}

impl TruncationLadder {
    pub fn new(k_values: Vec<f64>, stop_tol: f64) -> Result<Self> {
        if k_values.is_empty() {
            return Err(Error::InvalidLadder("no truncation levels".into()));
        }
        if k_values.iter().any(|k| !(*k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidLadder("levels must be positive and finite".into()));
        }
        if k_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidLadder("levels must be strictly increasing".into()));
        }
        if !(stop_tol > 0.0) {
            return Err(Error::InvalidLadder(format!("stop_tol = {stop_tol} must be > 0")));
        }
        Ok(TruncationLadder { k_values, stop_tol })
    }

    /// `k_j = k0 · ratio^j` for `j < max_rungs`.
    pub fn geometric(k0: f64, ratio: f64, max_rungs: usize, stop_tol: f64) -> Result<Self> {
        if !(ratio > 1.0) {
            return Err(Error::InvalidLadder(format!("ratio = {ratio} must exceed 1")));
        }
        let k_values = (0..max_rungs).map(|j| k0 * ratio.powi(j as i32)).collect();
        Self::new(k_values, stop_tol)
    }

    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn stop_tol(&self) -> f64 {
        self.stop_tol
    }

    pub fn max_rungs(&self) -> usize {
        self.k_values.len()
    }
}

// ---------------------------------------------------------------------------
// descriptor syntax

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "zero"),
            Potential::Constant(c) => write!(f, "const {c}"),
            Potential::Point { center, alpha } => {
                write!(f, "point {} {} alpha={alpha}", center[0], center[1])
            }
            Potential::Hyperplane { axis, offset, alpha } => {
                write!(f, "hyperplane x{} c={offset} alpha={alpha}", axis + 1)
            }
            Potential::Sum(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
            Potential::DistanceToSet { obstacle, alpha } => {
                write!(f, "distset {obstacle} alpha={alpha}")
            }
            Potential::InfiniteOn(region) => {
                write!(f, "infinite {region}")
            }
            Potential::Tabulated(..) => write!(f, "tabulated"),
            Potential::Custom(_) => write!(f, "custom"),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Configuration(msg.into())
}

fn number(tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(format!("expected a number, found `{tok}`")))
}

fn keyed(tok: Option<&&str>, key: &str) -> Result<f64> {
    let tok = tok.ok_or_else(|| bad(format!("missing `{key}=`")))?;
    let val = tok
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| bad(format!("expected `{key}=<value>`, found `{tok}`")))?;
    number(val)
}

/// Parses `disk cx cy r=R`, `interval a b` or `rect ax bx ay by`; returns
/// the region and the number of tokens consumed.
pub fn parse_region(toks: &[&str]) -> Result<(DomainKind, usize)> {
    let kind = match toks.first() {
        Some(&"disk") => {
            if toks.len() < 4 {
                return Err(bad("disk needs `disk <cx> <cy> r=<radius>`"));
            }
            DomainKind::Disk {
                center: [number(toks[1])?, number(toks[2])?],
                radius: keyed(toks.get(3), "r")?,
            }
        }
        Some(&"interval") => {
            if toks.len() < 3 {
                return Err(bad("interval needs `interval <a> <b>`"));
            }
            DomainKind::Interval { a: number(toks[1])?, b: number(toks[2])? }
        }
        Some(&"rect") | Some(&"rectangle") => {
            if toks.len() < 5 {
                return Err(bad("rect needs `rect <ax> <bx> <ay> <by>`"));
            }
            DomainKind::Rectangle {
                ax: number(toks[1])?,
                bx: number(toks[2])?,
                ay: number(toks[3])?,
                by: number(toks[4])?,
            }
        }
        Some(other) => return Err(bad(format!("unknown region `{other}`"))),
        None => return Err(bad("missing region")),
    };
    kind.validate().map_err(|e| bad(e.to_string()))?;
    let used = match kind {
        DomainKind::Disk { .. } => 4,
        DomainKind::Interval { .. } => 3,
        DomainKind::Rectangle { .. } => 5,
    };
    Ok((kind, used))
}

fn parse_term(toks: &[&str]) -> Result<Potential> {
    let finish = |p: Potential, used: usize| {
        if used == toks.len() {
            Ok(p)
        } else {
            Err(bad(format!("unexpected trailing `{}`", toks[used..].join(" "))))
        }
    };
    match toks.first() {
        Some(&"zero") => finish(Potential::Zero, 1),
        Some(&"const") => {
            let c = number(toks.get(1).ok_or_else(|| bad("const needs a value"))?)?;
            if c < 0.0 {
                return Err(bad("constant potential must be nonnegative"));
            }
            finish(Potential::Constant(c), 2)
        }
        Some(&"point") => {
            // `point x alpha=..` (1D) or `point x y alpha=..`
            let coords: Vec<f64> = toks[1..]
                .iter()
                .take_while(|t| !t.contains('='))
                .map(|t| number(t))
                .collect::<Result<_>>()?;
            let center = match coords.as_slice() {
                [x] => [*x, 0.0],
                [x, y] => [*x, *y],
                _ => return Err(bad("point needs one or two coordinates")),
            };
            let alpha = keyed(toks.get(1 + coords.len()), "alpha")?;
            finish(Potential::point(center, alpha), 2 + coords.len())
        }
        Some(&"hyperplane") => {
            let axis = match toks.get(1) {
                Some(&"x1") => 0,
                Some(&"x2") => 1,
                other => return Err(bad(format!("hyperplane axis must be x1 or x2, found {other:?}"))),
            };
            let c = keyed(toks.get(2), "c")?;
            let alpha = keyed(toks.get(3), "alpha")?;
            finish(Potential::hyperplane(axis, c, alpha), 4)
        }
        Some(&"distset") => {
            let (region, used) = parse_region(&toks[1..])?;
            let alpha = keyed(toks.get(1 + used), "alpha")?;
            finish(Potential::distance_to_set(region, alpha), 2 + used)
        }
        Some(&"infinite") => {
            let (region, used) = parse_region(&toks[1..])?;
            finish(Potential::InfiniteOn(region), 1 + used)
        }
        Some(other) => Err(bad(format!("unknown potential term `{other}`"))),
        None => Err(bad("empty potential term")),
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let mut terms: Vec<Potential> = toks
            .split(|t| *t == "+")
            .map(parse_term)
            .collect::<Result<_>>()?;
        if terms.len() == 1 {
            Ok(terms.pop().expect("one term"))
        } else {
            Ok(Potential::Sum(terms))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};

    #[test]
    fn point_singularity_values() {
        let v = Potential::point([0.0, 0.0], 2.0);
        assert_eq!(v.eval([0.5, 0.0]), 4.0);
        assert_eq!(v.eval([0.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn distance_to_set_is_infinite_on_obstacle() {
        let v = Potential::distance_to_set(DomainKind::Disk { center: [0.0, 0.0], radius: 0.3 }, 2.0);
        assert_eq!(v.eval([0.1, 0.1]), f64::INFINITY);
        assert_eq!(v.eval([0.3, 0.0]), f64::INFINITY);
        assert!((v.eval([0.5, 0.0]) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_clamps() {
        let g = build_grid(DomainSpec::interval(-1.0, 1.0, 5)).unwrap();
        let inf = Potential::custom(|_| f64::INFINITY);
        assert!(inf.truncate_to_field(&g, 7.0).unwrap().values().iter().all(|&v| v == 7.0));
        let three = Potential::Constant(3.0);
        assert!(three.truncate_to_field(&g, 5.0).unwrap().values().iter().all(|&v| v == 3.0));
        let plane = Potential::hyperplane(0, 0.0, 1.5);
        let t = plane.truncate_to_field(&g, 100.0).unwrap();
        let at_half = g.nearest_node([0.5, 0.0]);
        assert!((t.get(at_half) - 2.0f64.sqrt() * 2.0).abs() < 1e-12);
        assert!((t.get(at_half) - 2.828427).abs() < 1e-6);
        assert!(plane.truncate_to_field(&g, 0.0).is_err());
    }

    #[test]
    fn singular_cells() {
        // node on the singular point: integrable exponent reads the cell mean
        let g = build_grid(DomainSpec::interval(-1.0, 1.0, 9)).unwrap();
        let mid = g.nearest_node([0.0, 0.0]);
        let soft = Potential::point([0.0, 0.0], 0.5);
        let expected = (0.125f64).powf(-0.5) / 0.5;
        assert!((soft.node_value(&g, mid) - expected).abs() < 1e-12);
        let hard = Potential::point([0.0, 0.0], 1.5);
        assert_eq!(hard.node_value(&g, mid), f64::INFINITY);

        // an off-grid hyperplane still blocks the cell containing it
        let plane = Potential::hyperplane(0, 0.1, 1.5);
        let near = g.nearest_node([0.0, 0.0]);
        assert_eq!(plane.node_value(&g, near), f64::INFINITY);
        let gentle = Potential::hyperplane(0, 0.1, 0.5);
        assert!(gentle.node_value(&g, near).is_finite());
    }

    #[test]
    fn two_dimensional_cell_mean_matches_constant_case() {
        // α = 0 reduces the mean to 1
        assert!((centred_cell_mean(0.0, 0.1, 2) - 1.0).abs() < 1e-10);
        // α = 1: closed form (4/h)·asinh(1)
        let h = 0.2;
        let exact = 4.0 / h * 1.0f64.asinh();
        assert!((centred_cell_mean(1.0, h, 2) - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn ladder_validation() {
        let d = TruncationLadder::default();
        assert_eq!(d.max_rungs(), 24);
        assert_eq!(d.k_values()[3], 8.0);
        assert_eq!(d.stop_tol(), 1e-6);
        assert!(TruncationLadder::new(vec![1.0, 1.0], 1e-6).is_err());
        assert!(TruncationLadder::new(vec![1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn descriptor_syntax() {
        let v: Potential = "point 0 0 alpha=3".parse().unwrap();
        assert!(matches!(v, Potential::Point { alpha, .. } if alpha == 3.0));
        let v: Potential = "hyperplane x1 c=-0.3 alpha=2 + hyperplane x1 c=0.4 alpha=1.5"
            .parse()
            .unwrap();
        match &v {
            Potential::Sum(t) => assert_eq!(t.len(), 2),
            _ => panic!("expected a sum"),
        }
        let v: Potential = "distset disk 0 0 r=0.3 alpha=2".parse().unwrap();
        assert!(matches!(v, Potential::DistanceToSet { alpha, .. } if alpha == 2.0));
        assert!("point 0 0".parse::<Potential>().is_err());
        assert!("hyperplane x3 c=0 alpha=1".parse::<Potential>().is_err());
        assert!("wobble".parse::<Potential>().is_err());
        assert!("point 0 0 alpha=2 extra".parse::<Potential>().is_err());
    }
}
