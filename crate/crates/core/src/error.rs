use thiserror::Error;

/// Errors produced by model construction, diagonalization, and estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite matrix entry at ({row}, {col}): {value}")]
    NonFiniteEntry { row: usize, col: usize, value: f64 },

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionLimit { dim: usize, max: usize },

    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("state weights vanish on the requested sector: {0}")]
    WeightUnderflow(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("series tail not converged: {0}")]
    TailNotConverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
