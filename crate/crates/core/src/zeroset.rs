//! Detection of the torsion zero-set `S`, the grid components of `Ω∖S`,
//! the defect measure `λ` and the universal zero-set `Z`.
//!
//! Grid connectivity (2N-neighbour adjacency) stands in for
//! Sobolev-connectedness. A component `D` of `Ω∖S` is placed in `Z` when
//! the ladder solution with datum `χ_D` leaves a defect mass above `τ_Z`,
//! i.e. when the datum `χ_D` admits no distributional solution. The defect
//! is tested with bumps centred on the edge of the truncation-active set
//! `{V > K}` of the final rung, next to `D`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::green::{green_batch, GreenFunction};
use crate::grid::{DomainSpec, Field, Grid, Point};
use crate::linsolve::SolveOptions;
use crate::potential::{Potential, TruncationLadder};
use crate::schrodinger::{solve_ladder, LadderReport, MeasureData};

/// Boolean flag per interior node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMask {
    spec: DomainSpec,
    mask: Vec<bool>,
}

impl NodeMask {
    pub fn empty(grid: &Grid) -> Self {
        NodeMask { spec: *grid.spec(), mask: vec![false; grid.len()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(usize) -> bool) -> Self {
        NodeMask { spec: *grid.spec(), mask: (0..grid.len()).map(f).collect() }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        self.mask[idx] = value;
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn complement(&self) -> NodeMask {
        NodeMask { spec: self.spec, mask: self.mask.iter().map(|b| !b).collect() }
    }

    pub fn is_subset_of(&self, other: &NodeMask) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b)
    }

    /// Indicator field with values in {0, 1}.
    pub fn indicator(&self) -> Field {
        Field::from_parts(self.spec, self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
    }
}

/// `S = { ζ₁ ≤ τ_rel · max ζ₁ }`.
pub fn detect_s(zeta1: &Field, tau_rel: f64) -> Result<NodeMask> {
    let top = zeta1.max();
    if !(top > 0.0) {
        return Err(Error::DegenerateTorsion);
    }
    let cut = tau_rel * top;
    Ok(NodeMask { spec: *zeta1.spec(), mask: zeta1.values().iter().map(|&v| v <= cut).collect() })
}

/// Component label per node of `Ω∖S`; masked nodes carry `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLabels {
    labels: Vec<Option<usize>>,
    components: Vec<Vec<usize>>,
}

impl ComponentLabels {
    pub fn label(&self, idx: usize) -> Option<usize> {
        self.labels[idx]
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn nodes(&self, label: usize) -> &[usize] {
        &self.components[label]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn mask(&self, grid: &Grid, label: usize) -> NodeMask {
        NodeMask::from_fn(grid, |i| self.labels[i] == Some(label))
    }

    fn from_groups(n: usize, groups: Vec<Vec<usize>>) -> Self {
        let mut labels = vec![None; n];
        for (l, g) in groups.iter().enumerate() {
            for &i in g {
                if labels[i].is_none() {
                    labels[i] = Some(l);
                }
            }
        }
        ComponentLabels { labels, components: groups }
    }
}

/// Breadth-first labelling of the nodes outside `excluded`. Components are
/// numbered by their leftmost, then lowest, lattice node.
pub fn components(grid: &Grid, excluded: &NodeMask) -> ComponentLabels {
    let n = grid.len();
    let mut seen = vec![false; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if seen[start] || excluded.contains(start) {
            continue;
        }
        let mut group = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            group.push(i);
            for &m in grid.neighbors(i).iter().flatten() {
                if !seen[m] && !excluded.contains(m) {
                    seen[m] = true;
                    queue.push_back(m);
                }
            }
        }
        group.sort_unstable();
        groups.push(group);
    }
    groups.sort_by_key(|g| {
        g.iter().map(|&i| grid.lattice_index(i)).min().expect("nonempty component")
    });
    ComponentLabels::from_groups(n, groups)
}

/// Test field `ψ_c(y) = max{0, 1 − |y − c|/R}²` stored on its support.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: usize,
    pub radius: f64,
    pub support: Vec<(usize, f64)>,
}

impl Bump {
    pub fn new(grid: &Grid, center: usize, radius: f64) -> Self {
        let c = grid.node(center);
        let support = grid
            .nodes()
            .iter()
            .enumerate()
            .filter_map(|(i, &y)| {
                let t = 1.0 - grid.point_distance(y, c) / radius;
                (t > 0.0).then_some((i, t * t))
            })
            .collect();
        Bump { center, radius, support }
    }

    pub fn sup(&self) -> f64 {
        self.support.iter().fold(0.0, |m, (_, v)| m.max(*v))
    }

    /// Whether the bump vanishes on the two node layers next to `∂Ω`.
    pub fn is_interior(&self, grid: &Grid) -> bool {
        self.support.iter().all(|&(i, _)| grid.boundary_depth(i) > 2)
    }
}

/// Default bump radius: `max(4h, diam(Ω)/5)`. The physical floor keeps the
/// pairing of a defect spread along a curve independent of `h`.
pub fn default_bump_radius(grid: &Grid) -> f64 {
    (4.0 * grid.h()).max(grid.diameter() / 5.0)
}

/// Nodes where the truncation is active at level `k`, i.e. `V > k`. The
/// ladder concentrates the defect measure on this set.
pub fn truncation_carrier(grid: &Grid, potential: &Potential, k: f64) -> NodeMask {
    let samples = potential.sample(grid);
    NodeMask::from_fn(grid, |i| samples[i] > k)
}

/// Bumps centred on the edge of `carrier` (carrier nodes with a neighbour
/// outside it) whose support meets `region`, or any node outside the
/// carrier when `region` is `None`. Bumps reaching the two node layers
/// next to the boundary are dropped.
pub fn bump_dictionary(
    grid: &Grid,
    carrier: &NodeMask,
    region: Option<&NodeMask>,
    radius: f64,
) -> Vec<Bump> {
    let meets = |m: usize| match region {
        Some(r) => r.contains(m),
        None => !carrier.contains(m),
    };
    carrier
        .indices()
        .filter(|&c| grid.neighbors(c).iter().flatten().any(|&m| !carrier.contains(m)))
        .map(|c| Bump::new(grid, c, radius))
        .filter(|b| b.is_interior(grid) && b.support.iter().any(|&(i, _)| meets(i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpPairing {
    pub center: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectEstimate {
    pub pairings: Vec<BumpPairing>,
    /// `max λ[ψ] / ‖ψ‖∞` over the dictionary; 0 for an empty dictionary.
    pub total_defect: f64,
}

/// Pairs the defect measure with each bump:
///
/// `λ[ψ] = ∫_{Ω∖C} ψ dμ − ∫ u (−Δ_h ψ) − ∫_{Ω∖C} W u ψ`
///
/// where `W` is the truncated potential of the final rung and `C` the
/// carrier (normally [`truncation_carrier`], a subset of `S`). For a
/// distributional solution the pairing vanishes; mass absorbed on the
/// carrier shows up as a positive value.
pub fn defect_mass(
    grid: &Grid,
    w_final: &Field,
    u: &Field,
    data: &MeasureData,
    carrier: &NodeMask,
    bumps: &[Bump],
) -> Result<DefectEstimate> {
    grid.check(w_final)?;
    grid.check(u)?;
    let b = data.rhs(grid, usize::MAX)?;
    let (w, u, b) = (w_final.values(), u.values(), b.values());
    let h2 = grid.h() * grid.h();
    let centre = 2.0 * grid.dim() as f64;
    let mut psi = vec![0.0; grid.len()];
    let mut touched: Vec<usize> = Vec::new();
    let mut pairings = Vec::with_capacity(bumps.len());
    let mut total_defect: f64 = 0.0;
    for bump in bumps {
        if !bump.is_interior(grid) {
            return Err(Error::InvalidBump(bump.center));
        }
        for &(i, v) in &bump.support {
            psi[i] = v;
            touched.push(i);
            touched.extend(grid.neighbors(i).iter().flatten());
        }
        touched.sort_unstable();
        touched.dedup();
        let mut value = 0.0;
        for &y in &touched {
            let mut lap = centre * psi[y];
            for &m in grid.neighbors(y).iter().flatten() {
                lap -= psi[m];
            }
            value -= u[y] * lap / h2;
            if !carrier.contains(y) {
                value += psi[y] * (b[y] - w[y] * u[y]);
            }
        }
        value *= grid.cell_volume();
        for &y in &touched {
            psi[y] = 0.0;
        }
        touched.clear();
        let sup = bump.sup();
        if sup > 0.0 {
            total_defect = total_defect.max(value / sup);
        }
        pairings.push(BumpPairing { center: bump.center, value });
    }
    Ok(DefectEstimate { pairings, total_defect })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    InZ,
    NotInZ,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::InZ => "in_Z",
            Verdict::NotInZ => "not_in_Z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSetThresholds {
    /// Relative level below which `ζ₁` counts as zero.
    pub tau_s: f64,
    /// Defect level above which a component joins `Z`.
    pub tau_z: f64,
    /// `None` selects [`default_bump_radius`].
    pub bump_radius: Option<f64>,
}

impl Default for ZeroSetThresholds {
    fn default() -> Self {
        ZeroSetThresholds { tau_s: 1e-3, tau_z: 0.02, bump_radius: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentVerdict {
    pub label: usize,
    pub node_count: usize,
    pub defect: f64,
    pub bumps: usize,
    pub verdict: Verdict,
    pub ladder: LadderReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSetReport {
    pub s: NodeMask,
    pub z: NodeMask,
    pub labels: ComponentLabels,
    pub components: Vec<ComponentVerdict>,
    pub thresholds: ZeroSetThresholds,
}

impl ZeroSetReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("component,node_count,defect,verdict\n");
        for c in &self.components {
            let _ = writeln!(s, "{},{},{},{}", c.label, c.node_count, c.defect, c.verdict.as_str());
        }
        s
    }

    pub fn verdicts(&self) -> Vec<Verdict> {
        self.components.iter().map(|c| c.verdict).collect()
    }
}

/// Classifies every component of `Ω∖S` and assembles `Z = S ∪ (in_Z components)`.
pub fn classify_and_build_z(
    grid: &Grid,
    potential: &Potential,
    s: &NodeMask,
    labels: &ComponentLabels,
    ladder: &TruncationLadder,
    opts: &SolveOptions,
    thresholds: &ZeroSetThresholds,
) -> Result<ZeroSetReport> {
    let radius = thresholds.bump_radius.unwrap_or_else(|| default_bump_radius(grid));
    let components: Vec<ComponentVerdict> = (0..labels.count())
        .into_par_iter()
        .map(|label| {
            let region = labels.mask(grid, label);
            let f = region.indicator();
            let (u, ladder_report) = solve_ladder(grid, potential, &f, ladder, opts)?;
            let k = ladder_report.final_k();
            let w = potential.truncate_to_field(grid, k)?;
            let carrier = truncation_carrier(grid, potential, k);
            let bumps = bump_dictionary(grid, &carrier, Some(&region), radius);
            let data = MeasureData::from_density(f);
            let est = defect_mass(grid, &w, &u, &data, &carrier, &bumps)?;
            let verdict = if est.total_defect > thresholds.tau_z { Verdict::InZ } else { Verdict::NotInZ };
            Ok(ComponentVerdict {
                label,
                node_count: labels.nodes(label).len(),
                defect: est.total_defect,
                bumps: bumps.len(),
                verdict,
                ladder: ladder_report,
            })
        })
        .collect::<Result<_>>()?;

    let mut z = s.clone();
    for c in &components {
        if c.verdict == Verdict::InZ {
            for &i in labels.nodes(c.label) {
                z.set(i, true);
            }
        }
    }
    Ok(ZeroSetReport {
        s: s.clone(),
        z,
        labels: labels.clone(),
        components,
        thresholds: *thresholds,
    })
}

/// Torsion ladder, `S`, components and classification in one pass. Returns
/// `ζ₁` alongside the report.
pub fn analyze(
    grid: &Grid,
    potential: &Potential,
    ladder: &TruncationLadder,
    opts: &SolveOptions,
    thresholds: &ZeroSetThresholds,
) -> Result<(Field, LadderReport, ZeroSetReport)> {
    let (zeta1, rep) = solve_ladder(grid, potential, &grid.constant(1.0), ladder, opts)?;
    let s = detect_s(&zeta1, thresholds.tau_s)?;
    let labels = components(grid, &s);
    let report = classify_and_build_z(grid, potential, &s, &labels, ladder, opts, thresholds)?;
    Ok((zeta1, rep, report))
}

/// `ζ_{f χ_{Ω∖Z}}`: the ladder solution with the datum cut off on `Z`.
pub fn solve_off_z(
    grid: &Grid,
    potential: &Potential,
    f: &Field,
    z: &NodeMask,
    ladder: &TruncationLadder,
    opts: &SolveOptions,
) -> Result<(Field, LadderReport)> {
    let cut = f.zip_map(&z.indicator(), |v, inside| if inside > 0.0 { 0.0 } else { v })?;
    solve_ladder(grid, potential, &cut, ladder, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orthogonality {
    /// `∫ ζ_{χ_{Ω∖Z}} χ_Z`.
    pub off_z_on_z: f64,
    /// `∫ ζ_{χ_Z} χ_{Ω∖Z}`.
    pub on_z_off_z: f64,
}

pub fn orthogonality(
    grid: &Grid,
    potential: &Potential,
    z: &NodeMask,
    ladder: &TruncationLadder,
    opts: &SolveOptions,
) -> Result<Orthogonality> {
    let chi_z = z.indicator();
    let chi_rest = z.complement().indicator();
    let (a, _) = solve_ladder(grid, potential, &chi_rest, ladder, opts)?;
    let (b, _) = solve_ladder(grid, potential, &chi_z, ladder, opts)?;
    Ok(Orthogonality {
        off_z_on_z: grid.integrate(&a.zip_map(&chi_z, |x, y| x * y)?)?,
        on_z_off_z: grid.integrate(&b.zip_map(&chi_rest, |x, y| x * y)?)?,
    })
}

/// Fraction of the 3×3 (or 3-node in 1D) lattice neighbourhood of the node
/// nearest `p` that lies in `region`. Lattice positions outside the grid
/// count as outside the region.
pub fn neighborhood_fraction(grid: &Grid, region: &NodeMask, p: Point) -> f64 {
    let [i, j] = grid.lattice_index(grid.nearest_node(p));
    let (i, j) = (i as isize, j as isize);
    let dj: &[isize] = if grid.dim() == 1 { &[0] } else { &[-1, 0, 1] };
    let mut total = 0;
    let mut inside = 0;
    for &b in dj {
        for a in -1..=1 {
            total += 1;
            if let Some(m) = grid.node_at(i + a, j + b) {
                if region.contains(m) {
                    inside += 1;
                }
            }
        }
    }
    inside as f64 / total as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relation {
    Equal,
    Disjoint,
    /// Symmetric-difference fraction of two overlapping sets.
    Violation(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperlevelReport {
    pub sets: Vec<NodeMask>,
    /// `(i, j, relation, symmetric-difference fraction)` for every source pair.
    pub relations: Vec<(usize, usize, Relation, f64)>,
    /// Per source: dominant component of `Ω∖S` and the fraction of `U_x ∖ S`
    /// inside it.
    pub containment: Vec<(Option<usize>, f64)>,
    /// Classes of sources with equal superlevel sets, as node groups.
    pub classes: ComponentLabels,
    pub greens: Vec<GreenFunction>,
}

/// Tolerance on the symmetric-difference fraction for calling two
/// superlevel sets equal.
pub const SUPERLEVEL_EQUAL_FRACTION: f64 = 0.02;

/// Superlevel sets `U_x = {G_x > τ · max G_x} ∪ {x}` and their pairwise
/// relations.
#[allow(clippy::too_many_arguments)]
pub fn superlevel_partition(
    grid: &Grid,
    potential: &Potential,
    sources: &[Point],
    s: &NodeMask,
    labels: &ComponentLabels,
    ladder: &TruncationLadder,
    opts: &SolveOptions,
    tau_rel: f64,
) -> Result<SuperlevelReport> {
    for &x in sources {
        let idx = grid.nearest_node(x);
        if s.contains(idx) {
            return Err(Error::InvalidSource(idx));
        }
    }
    let greens = green_batch(grid, potential, sources, ladder, opts)?;
    let sets: Vec<NodeMask> = greens
        .iter()
        .map(|g| {
            let cut = tau_rel * g.off_source_max();
            NodeMask::from_fn(grid, |i| i == g.source_node || g.field.get(i) > cut)
        })
        .collect();

    let mut relations = Vec::new();
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            let (mut both, mut either) = (0usize, 0usize);
            for i in 0..grid.len() {
                let (x, y) = (sets[a].contains(i), sets[b].contains(i));
                both += (x && y) as usize;
                either += (x || y) as usize;
            }
            let frac = if either == 0 { 0.0 } else { (either - both) as f64 / either as f64 };
            let rel = if both == 0 {
                Relation::Disjoint
            } else if frac <= SUPERLEVEL_EQUAL_FRACTION {
                Relation::Equal
            } else {
                Relation::Violation(frac)
            };
            relations.push((a, b, rel, frac));
        }
    }

    let containment = sets
        .iter()
        .map(|set| {
            let mut counts = vec![0usize; labels.count()];
            let mut total = 0;
            for i in set.indices().filter(|&i| !s.contains(i)) {
                total += 1;
                if let Some(l) = labels.label(i) {
                    counts[l] += 1;
                }
            }
            match counts.iter().enumerate().max_by_key(|(l, c)| (**c, std::cmp::Reverse(*l))) {
                Some((l, &c)) if total > 0 => (Some(l), c as f64 / total as f64),
                _ => (None, 0.0),
            }
        })
        .collect();

    // group sources whose sets are equal
    let mut class_of: Vec<usize> = (0..sets.len()).collect();
    for &(a, b, rel, _) in &relations {
        if rel == Relation::Equal {
            let (ca, cb) = (class_of[a], class_of[b]);
            for c in class_of.iter_mut() {
                if *c == cb {
                    *c = ca;
                }
            }
        }
    }
    let mut reps: Vec<usize> = class_of.clone();
    reps.sort_unstable();
    reps.dedup();
    let groups: Vec<Vec<usize>> = reps
        .iter()
        .map(|&r| {
            let mut nodes: Vec<usize> = (0..sets.len())
                .filter(|&k| class_of[k] == r)
                .flat_map(|k| sets[k].indices().collect::<Vec<_>>())
                .collect();
            nodes.sort_unstable();
            nodes.dedup();
            nodes
        })
        .collect();
    let classes = ComponentLabels::from_groups(grid.len(), groups);

    Ok(SuperlevelReport { sets, relations, containment, classes, greens })
}
