use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is singular (no usable pivot in column {column})")]
    SingularMatrix { column: usize },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("equality rows are inconsistent (row {row} reduces to 0 = {residual})")]
    InconsistentRows { row: usize, residual: f64 },

    #[error("simplex stalled after {iterations} iterations")]
    NumericalBreakdown { iterations: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("instance outside oracle range (m = {m}, C = {c}; limits m <= 12, C <= 24)")]
    OutOfOracleRange { m: usize, c: usize },

    #[error("premise violated: {0}")]
    PremiseViolated(String),

    #[error("no feasible configuration exists")]
    NoFeasibleConfiguration,

    #[error("too many soft constraints for exhaustive search ({soft} > {limit})")]
    TooManySoftConstraints { soft: usize, limit: usize },

    #[error("problem file: {0}")]
    ProblemFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
