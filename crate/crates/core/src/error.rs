use thiserror::Error;

/// Errors raised by grid construction, solvers and the zero-set machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("resolution too coarse: n = {0}, need at least 3 nodes per axis")]
    ResolutionTooCoarse(usize),
    #[error("empty domain: no lattice node lies strictly inside the domain")]
    EmptyDomain,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("incompatible field: {0}")]
    IncompatibleField(String),
    #[error("invalid weight: W[{index}] = {value} is negative or not finite")]
    InvalidWeight { index: usize, value: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid ladder: {0}")]
    InvalidLadder(String),
    #[error("degenerate torsion: the torsion field has no positive value")]
    DegenerateTorsion,
    #[error("sources too close: distance {distance} < 2h = {limit}")]
    SourcesTooClose { distance: f64, limit: f64 },
    #[error("invalid bump centered at node {0}: support reaches within 2 nodes of the boundary")]
    InvalidBump(usize),
    #[error("invalid source: node {0} lies in the detected zero-set S")]
    InvalidSource(usize),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
