//! Uniform finite-difference grids on intervals, rectangles and disks.
//!
//! Only lattice nodes lying strictly inside the domain carry unknowns. A
//! neighbour that is missing from the interior set stands for a boundary
//! node where the homogeneous Dirichlet condition holds, so it contributes
//! zero to every stencil.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

/// A point of the plane; one-dimensional grids use `[x, 0.0]`.
pub type Point = [f64; 2];

/// Shape of a domain, also used as an obstacle or region descriptor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    Interval { a: f64, b: f64 },
    Rectangle { ax: f64, bx: f64, ay: f64, by: f64 },
    Disk { center: Point, radius: f64 },
}

/// Region syntax shared with potential descriptors: `interval a b`,
/// `rect ax bx ay by`, `disk cx cy r=R`.
impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Interval { a, b } => write!(f, "interval {a} {b}"),
            DomainKind::Rectangle { ax, bx, ay, by } => write!(f, "rect {ax} {bx} {ay} {by}"),
            DomainKind::Disk { center, radius } => write!(f, "disk {} {} r={radius}", center[0], center[1]),
        }
    }
}

impl DomainKind {
    pub fn dim(&self) -> usize {
        match self {
            DomainKind::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DomainKind::Interval { a, b } => a.is_finite() && b.is_finite() && a < b,
            DomainKind::Rectangle { ax, bx, ay, by } => {
                [ax, bx, ay, by].iter().all(|v| v.is_finite()) && ax < bx && ay < by
            }
            DomainKind::Disk { center, radius } => {
                center.iter().all(|v| v.is_finite()) && radius.is_finite() && radius > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDomain(format!("{self:?}")))
        }
    }

    /// Strict membership in the open set.
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            DomainKind::Interval { a, b } => a < p[0] && p[0] < b,
            DomainKind::Rectangle { ax, bx, ay, by } => {
                ax < p[0] && p[0] < bx && ay < p[1] && p[1] < by
            }
            DomainKind::Disk { center, radius } => distance(p, center) < radius,
        }
    }

    /// Euclidean distance from `p` to the closure of the set.
    pub fn distance_to_closure(&self, p: Point) -> f64 {
        match *self {
            DomainKind::Interval { a, b } => (a - p[0]).max(p[0] - b).max(0.0),
            DomainKind::Rectangle { ax, bx, ay, by } => {
                let dx = (ax - p[0]).max(p[0] - bx).max(0.0);
                let dy = (ay - p[1]).max(p[1] - by).max(0.0);
                dx.hypot(dy)
            }
            DomainKind::Disk { center, radius } => (distance(p, center) - radius).max(0.0),
        }
    }

    /// Whether the closure of the set meets the half-open box `[lo, hi)`.
    /// For intervals only the first coordinate is compared.
    pub fn meets_box(&self, lo: Point, hi: Point) -> bool {
        match *self {
            DomainKind::Interval { a, b } => a < hi[0] && b >= lo[0],
            DomainKind::Rectangle { ax, bx, ay, by } => {
                ax < hi[0] && bx >= lo[0] && ay < hi[1] && by >= lo[1]
            }
            DomainKind::Disk { center, radius } => {
                let cx = center[0].clamp(lo[0], hi[0]);
                let cy = center[1].clamp(lo[1], hi[1]);
                distance([cx, cy], center) < radius
            }
        }
    }

    /// Lebesgue measure (length or area).
    pub fn measure(&self) -> f64 {
        match *self {
            DomainKind::Interval { a, b } => b - a,
            DomainKind::Rectangle { ax, bx, ay, by } => (bx - ax) * (by - ay),
            DomainKind::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            DomainKind::Interval { a, b } => b - a,
            DomainKind::Rectangle { ax, bx, ay, by } => (bx - ax).hypot(by - ay),
            DomainKind::Disk { radius, .. } => 2.0 * radius,
        }
    }
}

pub fn distance(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// A domain together with its resolution (lattice nodes per axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub n: usize,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, n: usize) -> Self {
        DomainSpec { kind, n }
    }

    pub fn interval(a: f64, b: f64, n: usize) -> Self {
        Self::new(DomainKind::Interval { a, b }, n)
    }

    pub fn rectangle(ax: f64, bx: f64, ay: f64, by: f64, n: usize) -> Self {
        Self::new(DomainKind::Rectangle { ax, bx, ay, by }, n)
    }

    pub fn disk(center: Point, radius: f64, n: usize) -> Self {
        Self::new(DomainKind::Disk { center, radius }, n)
    }

    pub fn with_resolution(self, n: usize) -> Self {
        DomainSpec { n, ..self }
    }
}

/// Discretised domain: interior nodes, neighbour table and spacing.
#[derive(Debug, Clone)]
pub struct Grid {
    spec: DomainSpec,
    dim: usize,
    h: f64,
    origin: Point,
    shape: [usize; 2],
    nodes: Vec<Point>,
    lattice: Vec<[usize; 2]>,
    neighbors: Vec<[Option<usize>; 4]>,
    depth: Vec<usize>,
    lookup: Vec<Option<usize>>,
}

/// Builds the uniform grid for `spec`.
pub fn build_grid(spec: DomainSpec) -> Result<Grid> {
    Grid::new(spec)
}

impl Grid {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        spec.kind.validate()?;
        let n = spec.n;
        if n < 3 {
            return Err(Error::ResolutionTooCoarse(n));
        }
        let (h, origin, shape) = match spec.kind {
            DomainKind::Interval { a, b } => ((b - a) / (n - 1) as f64, [a, 0.0], [n, 1]),
            DomainKind::Rectangle { ax, bx, ay, by } => {
                let h = (bx - ax) / (n - 1) as f64;
                let steps = (by - ay) / h;
                let ny = steps.round();
                if (steps - ny).abs() > 1e-9 * steps.max(1.0) || ny < 2.0 {
                    return Err(Error::InvalidDomain(format!(
                        "rectangle side ratio incompatible with a square lattice at n = {n}"
                    )));
                }
                (h, [ax, ay], [n, ny as usize + 1])
            }
            DomainKind::Disk { center, radius } => {
                let h = 2.0 * radius / (n - 1) as f64;
                (h, [center[0] - radius, center[1] - radius], [n, n])
            }
        };
        let dim = spec.kind.dim();

        let mut lookup = vec![None; shape[0] * shape[1]];
        let mut nodes = Vec::new();
        let mut lattice = Vec::new();
        for j in 0..shape[1] {
            for i in 0..shape[0] {
                let p = [
                    origin[0] + i as f64 * h,
                    if dim == 1 { 0.0 } else { origin[1] + j as f64 * h },
                ];
                let inside = match spec.kind {
                    // lattice edges are the boundary; interior decided by index
                    DomainKind::Interval { .. } => i > 0 && i + 1 < shape[0],
                    DomainKind::Rectangle { .. } => {
                        i > 0 && i + 1 < shape[0] && j > 0 && j + 1 < shape[1]
                    }
                    DomainKind::Disk { .. } => spec.kind.contains(p),
                };
                if inside {
                    lookup[j * shape[0] + i] = Some(nodes.len());
                    nodes.push(p);
                    lattice.push([i, j]);
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::EmptyDomain);
        }

        let at = |i: isize, j: isize| -> Option<usize> {
            if i < 0 || j < 0 || i >= shape[0] as isize || j >= shape[1] as isize {
                None
            } else {
                lookup[j as usize * shape[0] + i as usize]
            }
        };
        let neighbors: Vec<[Option<usize>; 4]> = lattice
            .iter()
            .map(|&[i, j]| {
                let (i, j) = (i as isize, j as isize);
                if dim == 1 {
                    [at(i - 1, j), at(i + 1, j), None, None]
                } else {
                    [at(i - 1, j), at(i + 1, j), at(i, j - 1), at(i, j + 1)]
                }
            })
            .collect();

        // graph distance to the nearest missing lattice position
        let mut depth = vec![usize::MAX; nodes.len()];
        let mut queue = VecDeque::new();
        for (idx, nb) in neighbors.iter().enumerate() {
            if nb[..2 * dim].iter().any(Option::is_none) {
                depth[idx] = 1;
                queue.push_back(idx);
            }
        }
        while let Some(idx) = queue.pop_front() {
            for &m in neighbors[idx][..2 * dim].iter().flatten() {
                if depth[m] == usize::MAX {
                    depth[m] = depth[idx] + 1;
                    queue.push_back(m);
                }
            }
        }

        Ok(Grid { spec, dim, h, origin, shape, nodes, lattice, neighbors, depth, lookup })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Quadrature weight of one node, `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> Point {
        self.nodes[idx]
    }

    pub fn lattice_index(&self, idx: usize) -> [usize; 2] {
        self.lattice[idx]
    }

    /// Neighbours of a node: left, right, and in 2D down, up. `None` marks
    /// a boundary position.
    pub fn neighbors(&self, idx: usize) -> &[Option<usize>] {
        &self.neighbors[idx][..2 * self.dim]
    }

    /// Lattice steps from the node to the nearest boundary position (1 for
    /// nodes adjacent to the boundary).
    pub fn boundary_depth(&self, idx: usize) -> usize {
        self.depth[idx]
    }

    /// Interior node at lattice position `(i, j)`, if any.
    pub fn node_at(&self, i: isize, j: isize) -> Option<usize> {
        if i < 0 || j < 0 || i >= self.shape[0] as isize || j >= self.shape[1] as isize {
            return None;
        }
        self.lookup[j as usize * self.shape[0] + i as usize]
    }

    pub fn contains(&self, p: Point) -> bool {
        self.spec.kind.contains(p)
    }

    pub fn measure(&self) -> f64 {
        self.spec.kind.measure()
    }

    pub fn diameter(&self) -> f64 {
        self.spec.kind.diameter()
    }

    /// Nearest interior node to `p`; ties resolve to the lowest index.
    pub fn nearest_node(&self, p: Point) -> usize {
        let i = ((p[0] - self.origin[0]) / self.h).round();
        let j = if self.dim == 1 { 0.0 } else { ((p[1] - self.origin[1]) / self.h).round() };
        if let Some(idx) = self.node_at(i as isize, j as isize) {
            let d = self.point_distance(self.nodes[idx], p);
            if d <= 0.5 * self.h * (self.dim as f64).sqrt() + 1e-12 * self.h {
                return idx;
            }
        }
        let mut best = (f64::INFINITY, 0);
        for (idx, &q) in self.nodes.iter().enumerate() {
            let d = self.point_distance(q, p);
            if d < best.0 {
                best = (d, idx);
            }
        }
        best.1
    }

    /// Distance in the grid's dimension (the second coordinate is ignored in 1D).
    pub fn point_distance(&self, p: Point, q: Point) -> f64 {
        if self.dim == 1 {
            (p[0] - q[0]).abs()
        } else {
            distance(p, q)
        }
    }

    /// Half-open dual cell `[x - h/2, x + h/2)` of a node.
    pub fn cell(&self, idx: usize) -> (Point, Point) {
        let p = self.nodes[idx];
        let r = 0.5 * self.h;
        if self.dim == 1 {
            ([p[0] - r, 0.0], [p[0] + r, 0.0])
        } else {
            ([p[0] - r, p[1] - r], [p[0] + r, p[1] + r])
        }
    }

    pub(crate) fn check(&self, u: &Field) -> Result<()> {
        if u.spec != self.spec || u.values.len() != self.len() {
            return Err(Error::IncompatibleField(format!(
                "field with {} values on {:?} does not live on grid {:?} with {} nodes",
                u.values.len(),
                u.spec,
                self.spec,
                self.len()
            )));
        }
        Ok(())
    }

    /// `(−Δ_h u)(x) = (2N u(x) − Σ_neighbours u) / h²`.
    pub fn apply_neg_laplacian(&self, u: &Field) -> Result<Field> {
        self.check(u)?;
        let mut out = vec![0.0; self.len()];
        self.neg_laplacian_into(&u.values, &mut out);
        Ok(Field { spec: self.spec, values: out })
    }

    pub(crate) fn neg_laplacian_into(&self, u: &[f64], out: &mut [f64]) {
        let inv_h2 = 1.0 / (self.h * self.h);
        let centre = 2.0 * self.dim as f64;
        for (idx, o) in out.iter_mut().enumerate() {
            let mut s = centre * u[idx];
            for m in self.neighbors(idx).iter().flatten() {
                s -= u[*m];
            }
            *o = s * inv_h2;
        }
    }

    /// Node-sum quadrature `h^N Σ u`.
    pub fn integrate(&self, u: &Field) -> Result<f64> {
        self.check(u)?;
        Ok(self.cell_volume() * u.values.iter().sum::<f64>())
    }

    pub fn norms(&self, u: &Field) -> Result<Norms> {
        self.check(u)?;
        Ok(Norms {
            l1: self.cell_volume() * u.values.iter().map(|v| v.abs()).sum::<f64>(),
            linf: u.linf(),
        })
    }

    /// `h^N Σ |u w|`.
    pub fn l1_weighted(&self, u: &Field, w: &Field) -> Result<f64> {
        self.check(u)?;
        self.check(w)?;
        Ok(self.cell_volume() * u.values.iter().zip(&w.values).map(|(a, b)| (a * b).abs()).sum::<f64>())
    }

    /// Field dump as CSV: `i,j,x,y,value` in 2D and `i,x,value` in 1D.
    pub fn field_csv(&self, u: &Field) -> Result<String> {
        self.check(u)?;
        let mut s = String::new();
        if self.dim == 1 {
            s.push_str("i,x,value\n");
        } else {
            s.push_str("i,j,x,y,value\n");
        }
        for (idx, v) in u.values.iter().enumerate() {
            let [i, j] = self.lattice[idx];
            let p = self.nodes[idx];
            if self.dim == 1 {
                let _ = writeln!(s, "{i},{},{v}", p[0]);
            } else {
                let _ = writeln!(s, "{i},{j},{},{},{v}", p[0], p[1]);
            }
        }
        Ok(s)
    }

    pub fn zeros(&self) -> Field {
        Field { spec: self.spec, values: vec![0.0; self.len()] }
    }

    pub fn constant(&self, c: f64) -> Field {
        Field { spec: self.spec, values: vec![c; self.len()] }
    }

    pub fn field_from_fn(&self, f: impl Fn(Point) -> f64) -> Field {
        Field { spec: self.spec, values: self.nodes.iter().map(|&p| f(p)).collect() }
    }

    /// Wraps node values; fails on length mismatch or non-finite entries.
    pub fn field(&self, values: Vec<f64>) -> Result<Field> {
        if values.len() != self.len() {
            return Err(Error::IncompatibleField(format!(
                "{} values for {} nodes",
                values.len(),
                self.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::IncompatibleField(format!("value at node {i} is not finite")));
        }
        Ok(Field { spec: self.spec, values })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub linf: f64,
}

/// Real values on the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: DomainSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Combines two fields on the same grid nodewise.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        if self.spec != other.spec || self.len() != other.len() {
            return Err(Error::IncompatibleField("fields live on different grids".into()));
        }
        Ok(Field {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        self.zip_map(other, |x, y| a * x + b * y)
    }

    pub(crate) fn from_parts(spec: DomainSpec, values: Vec<f64>) -> Field {
        Field { spec, values }
    }
}
