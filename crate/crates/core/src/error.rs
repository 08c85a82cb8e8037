use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: entries sum to {sum:.12}, expected 1 within 1e-9")]
    InvalidDistribution { sum: f64 },

    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("cardinality {found} out of range (minimum {min})")]
    BadCardinality { found: usize, min: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cell ({x}, {y}) outside {width}x{height} grid")]
    OutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },

    #[error("illegal action: {0}")]
    IllegalAction(String),

    #[error("no legal action fits the remaining budget")]
    NoLegalActions,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("search tree inconsistency: {0}")]
    TreeInconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
