//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vertex pair ({i}, {j}) for a graph on {n} vertices")]
    InvalidVertexPair { i: usize, j: usize, n: usize },

    #[error("vertex count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid vertex count {n}: {reason}")]
    InvalidVertexCount { n: usize, reason: &'static str },

    #[error("statistic selection must not be empty")]
    EmptySelection,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("coefficient/selection mismatch: selection has {selected} statistics, beta has {given}")]
    BetaLengthMismatch { selected: usize, given: usize },

    #[error("fixed-point assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("edge list parse error at line {line}: {message}")]
    EdgeListParse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
