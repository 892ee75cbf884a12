use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the reconciliation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("degree distribution has no threshold")]
    MissingThreshold,
    #[error("matrix construction failed: {0}")]
    Construction(String),
    #[error("invalid parity-check matrix: {0}")]
    InvalidMatrix(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("input vector is not unit norm (norm = {0})")]
    NotUnitNorm(f64),
    #[error("rate adaptation domain error: {0}")]
    Domain(String),
    #[error("infeasible rate-adaptation plan: {0}")]
    InfeasiblePlan(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn mismatch(expected: usize, actual: usize) -> Self {
        Error::LengthMismatch { expected, actual }
    }
}
