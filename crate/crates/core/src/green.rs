//! Green's functions of `−Δ + V` as duality solutions with a unit atom.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Point};
use crate::linsolve::SolveOptions;
use crate::potential::{Potential, TruncationLadder};
use crate::schrodinger::{solve_ladder, solve_measure, LadderReport, MeasureData};

#[derive(Debug, Clone, PartialEq)]
pub struct GreenFunction {
    pub source: Point,
    pub source_node: usize,
    pub field: Field,
    pub report: LadderReport,
}

impl GreenFunction {
    /// Largest value away from the source node.
    pub fn off_source_max(&self) -> f64 {
        self.field
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.source_node)
            .fold(0.0, |m, (_, &v)| m.max(v))
    }
}

pub fn green_function(
    grid: &Grid,
    potential: &Potential,
    source: Point,
    ladder: &TruncationLadder,
    opts: &SolveOptions,
) -> Result<GreenFunction> {
    let data = MeasureData::dirac(source, 1.0);
    let (field, report) = solve_measure(grid, potential, &data, ladder, opts)?;
    Ok(GreenFunction { source, source_node: grid.nearest_node(source), field, report })
}

/// Green's functions for several sources, returned in source order.
pub fn green_batch(
    grid: &Grid,
    potential: &Potential,
    sources: &[Point],
    ladder: &TruncationLadder,
    opts: &SolveOptions,
) -> Result<Vec<GreenFunction>> {
    sources
        .par_iter()
        .map(|&x| green_function(grid, potential, x, ladder, opts))
        .collect()
}

/// `|G_x(y) − G_y(x)|` read at the nodes nearest to the sources.
pub fn symmetry_defect(grid: &Grid, gx: &GreenFunction, gy: &GreenFunction) -> Result<f64> {
    let distance = grid.point_distance(gx.source, gy.source);
    let limit = 2.0 * grid.h();
    if distance < limit {
        return Err(Error::SourcesTooClose { distance, limit });
    }
    Ok((gx.field.get(gy.source_node) - gy.field.get(gx.source_node)).abs())
}

/// Fundamental solution of the Laplacian in the plane, `(1/2π) log(d/|z|)`.
pub fn fundamental_solution(r: f64, d: f64) -> f64 {
    (d / r).ln() / (2.0 * std::f64::consts::PI)
}

/// Constant `d` in the fundamental solution: `1.25 · diam(Ω)`.
pub fn fundamental_scale(grid: &Grid) -> f64 {
    1.25 * grid.diameter()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    /// `min G_x` over all nodes.
    pub min_value: f64,
    /// 2D: `min (F(x − y) − G_x(y))` over nodes `y` other than the source.
    /// 1D: `min (G_x(x) − G_x(y))`.
    pub upper_margin: f64,
}

pub fn fundamental_bound(grid: &Grid, g: &GreenFunction) -> BoundCheck {
    let min_value = g.field.min();
    let upper_margin = if grid.dim() == 2 {
        let d = fundamental_scale(grid);
        let x = grid.node(g.source_node);
        g.field
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != g.source_node)
            .map(|(i, &v)| fundamental_solution(grid.point_distance(x, grid.node(i)), d) - v)
            .fold(f64::INFINITY, f64::min)
    } else {
        let top = g.field.get(g.source_node);
        g.field.values().iter().map(|&v| top - v).fold(f64::INFINITY, f64::min)
    };
    BoundCheck { min_value, upper_margin }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationSample {
    pub point: Point,
    /// Ladder solution at the node nearest the sample.
    pub direct: f64,
    /// `∫ G_x f`.
    pub via_green: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationReport {
    pub samples: Vec<RepresentationSample>,
    pub max_relative_error: f64,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Compares `ζ_f(x)` with `∫ G_x f` at each sample point.
pub fn representation_check(
    grid: &Grid,
    potential: &Potential,
    f: &Field,
    samples: &[Point],
    ladder: &TruncationLadder,
    opts: &SolveOptions,
) -> Result<RepresentationReport> {
    let (zeta, _) = solve_ladder(grid, potential, f, ladder, opts)?;
    let greens = green_batch(grid, potential, samples, ladder, opts)?;
    let mut out = Vec::with_capacity(samples.len());
    for g in &greens {
        let direct = zeta.get(g.source_node);
        let product = g.field.zip_map(f, |a, b| a * b)?;
        let via_green = grid.integrate(&product)?;
        out.push(RepresentationSample {
            point: g.source,
            direct,
            via_green,
            relative_error: relative_gap(direct, via_green),
        });
    }
    let max_relative_error = out.iter().map(|s| s.relative_error).fold(0.0, f64::max);
    Ok(RepresentationReport { samples: out, max_relative_error })
}

/// One field CSV per source, named `green_<index>.csv`.
pub fn batch_csv(grid: &Grid, greens: &[GreenFunction]) -> Result<Vec<(String, String)>> {
    greens
        .iter()
        .enumerate()
        .map(|(i, g)| Ok((format!("green_{i}.csv"), grid.field_csv(&g.field)?)))
        .collect()
}
