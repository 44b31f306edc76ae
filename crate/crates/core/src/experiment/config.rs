//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! name = twin
//! domain = disk 0 0 r=1
//! potential = hyperplane x1 c=-0.3 alpha=3 + hyperplane x1 c=0.4 alpha=1.5
//! data = const 1
//! resolutions = 33, 65
//! ladder = 1, 2, 24
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{DomainKind, Field, Grid, Point};
use crate::potential::{parse_region, Potential, TruncationLadder};
use crate::schrodinger::{Atom, MeasureData};
use crate::zeroset::ZeroSetThresholds;

/// Right-hand side of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    Constant(f64),
    /// `χ_R` for a region `R`.
    Indicator(DomainKind),
    Atoms(Vec<Atom>),
}

impl DataSpec {
    pub fn measure(&self, grid: &Grid) -> MeasureData {
        match self {
            DataSpec::Constant(c) => MeasureData::from_density(grid.constant(*c)),
            DataSpec::Indicator(region) => MeasureData::from_density(indicator(grid, region)),
            DataSpec::Atoms(atoms) => MeasureData { atoms: atoms.clone(), ..MeasureData::zero() },
        }
    }
}

/// `1` on nodes inside `region` (closed), `0` elsewhere.
pub fn indicator(grid: &Grid, region: &DomainKind) -> Field {
    grid.field_from_fn(|p| if region.distance_to_closure(p) == 0.0 { 1.0 } else { 0.0 })
}

impl fmt::Display for DataSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSpec::Constant(c) => write!(f, "const {c}"),
            DataSpec::Indicator(r) => write!(f, "indicator {r}"),
            DataSpec::Atoms(atoms) => {
                for (i, a) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "atom {} {} w={}", a.location[0], a.location[1], a.weight)?;
                }
                Ok(())
            }
        }
    }
}

fn number(tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Configuration(format!("expected a number, found `{tok}`")))
}

impl FromStr for DataSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        match toks.first() {
            Some(&"const") if toks.len() == 2 => {
                let c = number(toks[1])?;
                if c < 0.0 {
                    return Err(Error::Configuration("data must be nonnegative".into()));
                }
                Ok(DataSpec::Constant(c))
            }
            Some(&"indicator") => {
                let (region, used) = parse_region(&toks[1..])?;
                if used + 1 != toks.len() {
                    return Err(Error::Configuration("trailing tokens after indicator region".into()));
                }
                Ok(DataSpec::Indicator(region))
            }
            Some(&"atom") => {
                let atoms = toks
                    .split(|t| *t == "+")
                    .map(|term| match term {
                        ["atom", x, w] if w.starts_with("w=") => {
                            Ok(Atom { location: [number(x)?, 0.0], weight: number(&w[2..])? })
                        }
                        ["atom", x, y, w] if w.starts_with("w=") => {
                            Ok(Atom { location: [number(x)?, number(y)?], weight: number(&w[2..])? })
                        }
                        _ => Err(Error::Configuration(format!(
                            "expected `atom <x> [<y>] w=<weight>`, found `{}`",
                            term.join(" ")
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(DataSpec::Atoms(atoms))
            }
            _ => Err(Error::Configuration(format!(
                "data must be `const <v>`, `indicator <region>` or `atom ...`, found `{s}`"
            ))),
        }
    }
}

/// Acceptance tolerances of the generic checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub absorption: f64,
    pub domination: f64,
    /// Relative to `max u`.
    pub comparison: f64,
    pub tau_pos: f64,
    pub tau_zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { absorption: 1e-6, domination: 1e-8, comparison: 1e-6, tau_pos: 1e-3, tau_zero: 1e-2 }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub domain: DomainKind,
    pub potential: Potential,
    pub data: DataSpec,
    pub resolutions: Vec<usize>,
    pub ladder: TruncationLadder,
    pub thresholds: ZeroSetThresholds,
    pub tolerances: Tolerances,
    /// Exponent of the comparison function `H`.
    pub comparison_alpha: f64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn new(name: &str, domain: DomainKind, potential: Potential) -> Self {
        ExperimentConfig {
            name: name.to_owned(),
            domain,
            potential,
            data: DataSpec::Constant(1.0),
            resolutions: vec![65],
            ladder: TruncationLadder::default(),
            thresholds: ZeroSetThresholds::default(),
            tolerances: Tolerances::default(),
            comparison_alpha: 2.0,
            out: PathBuf::from("out").join(name),
        }
    }

    /// Parses the flat text format. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut domain = None;
        let mut potential = None;
        let mut data = None;
        let mut resolutions = None;
        let mut ladder_parts: Option<(f64, f64, usize)> = None;
        let mut stop_tol = 1e-6;
        let mut thresholds = ZeroSetThresholds::default();
        let mut tolerances = Tolerances::default();
        let mut comparison_alpha = 2.0;
        let mut out = None;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse { line, message };
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| perr(format!("expected `key = value`, found `{content}`")))?;
            let lift = |e: Error| match e {
                Error::Configuration(m) => perr(m),
                other => perr(other.to_string()),
            };
            let num = |v: &str| number(v).map_err(lift);
            match key {
                "name" => name = Some(value.to_owned()),
                "domain" => {
                    let toks: Vec<&str> = value.split_whitespace().collect();
                    let (kind, used) = parse_region(&toks).map_err(lift)?;
                    if used != toks.len() {
                        return Err(perr("trailing tokens after domain".into()));
                    }
                    domain = Some(kind);
                }
                "potential" => potential = Some(value.parse::<Potential>().map_err(lift)?),
                "data" => data = Some(value.parse::<DataSpec>().map_err(lift)?),
                "resolutions" => resolutions = Some(parse_resolutions(value).map_err(lift)?),
                "ladder" => ladder_parts = Some(parse_ladder(value).map_err(lift)?),
                "ladder_tol" => stop_tol = num(value)?,
                "tau_s" => thresholds.tau_s = num(value)?,
                "tau_z" => thresholds.tau_z = num(value)?,
                "bump_radius" => thresholds.bump_radius = Some(num(value)?),
                "tau_pos" => tolerances.tau_pos = num(value)?,
                "tau_zero" => tolerances.tau_zero = num(value)?,
                "tol_absorption" => tolerances.absorption = num(value)?,
                "tol_domination" => tolerances.domination = num(value)?,
                "tol_comparison" => tolerances.comparison = num(value)?,
                "comparison_alpha" => comparison_alpha = num(value)?,
                "out" => out = Some(PathBuf::from(value)),
                other => return Err(perr(format!("unknown key `{other}`"))),
            }
        }

        let missing = |what: &str| Error::Parse { line: 0, message: format!("missing `{what}`") };
        let name: String = name.unwrap_or_else(|| "experiment".to_owned());
        let (k0, ratio, max) = ladder_parts.unwrap_or((1.0, 2.0, 24));
        let ladder = TruncationLadder::geometric(k0, ratio, max, stop_tol)
            .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
        Ok(ExperimentConfig {
            out: out.unwrap_or_else(|| PathBuf::from("out").join(&name)),
            name,
            domain: domain.ok_or_else(|| missing("domain"))?,
            potential: potential.ok_or_else(|| missing("potential"))?,
            data: data.unwrap_or(DataSpec::Constant(1.0)),
            resolutions: resolutions.unwrap_or_else(|| vec![65]),
            ladder,
            thresholds,
            tolerances,
            comparison_alpha,
        })
    }

    /// Data atoms must lie inside the domain.
    pub fn atom_locations(&self) -> Vec<Point> {
        match &self.data {
            DataSpec::Atoms(a) => a.iter().map(|a| a.location).collect(),
            _ => Vec::new(),
        }
    }
}

/// `33,65,129` or `65`.
pub fn parse_resolutions(s: &str) -> Result<Vec<usize>> {
    let out: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Configuration(format!("expected a node count, found `{}`", t.trim())))
        })
        .collect::<Result<_>>()?;
    if let Some(&bad) = out.iter().find(|&&n| n < 3) {
        return Err(Error::Configuration(format!("resolution {bad} is below 3")));
    }
    if out.is_empty() {
        return Err(Error::Configuration("empty resolution list".into()));
    }
    Ok(out)
}

/// `k0,ratio,max_rungs`.
pub fn parse_ladder(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [k0, ratio, max] => {
            let max = max
                .parse::<usize>()
                .map_err(|_| Error::Configuration(format!("expected a rung count, found `{max}`")))?;
            Ok((number(k0)?, number(ratio)?, max))
        }
        _ => Err(Error::Configuration(format!("ladder must be `k0,ratio,max`, found `{s}`"))),
    }
}
