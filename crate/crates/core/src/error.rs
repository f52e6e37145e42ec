use thiserror::Error;

/// Errors raised by the linear-algebra, oracle and identification layers.
///
/// Node indices carried by the variants are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} out of range for dimension {dim}")]
    InvalidIndex { index: usize, dim: usize },
    #[error("conditioning set contains query node {node}")]
    InvalidConditioningSet { node: usize },
    #[error("query pair must have distinct nodes, got ({0}, {0})")]
    InvalidPair(usize),
    #[error("conditioning submatrix over {size} nodes is numerically singular")]
    SingularConditioningSet { size: usize },
    #[error("matrix is not positive definite (pivot {pivot} failed)")]
    NotPositiveDefinite { pivot: usize },
    #[error("conditioning set of size {conditioning} needs more than {samples} samples")]
    InsufficientSamples { conditioning: usize, samples: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
