use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid register: {0}")]
    InvalidRegister(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error in {what}: value {value} outside admissible range")]
    Domain { what: &'static str, value: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("negative variance {0:e} exceeds round-off tolerance")]
    NegativeVariance(f64),

    #[error("refused: {0}")]
    Refused(String),

    #[error("sweep failed in {} cell(s); first at theta index {}, tau index {}: {}", .0.len(), .0[0].theta_index, .0[0].tau_index, .0[0].message)]
    Sweep(Vec<CellError>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failure of a single sweep cell, keyed by its grid coordinates.
#[derive(Debug, Clone)]
pub struct CellError {
    pub theta_index: usize,
    pub tau_index: usize,
    pub message: String,
}
