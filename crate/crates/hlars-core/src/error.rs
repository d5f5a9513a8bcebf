//! Crate-wide error type.

/// Errors produced by design construction, solving, and replication studies.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A column has zero scale and cannot be standardized.
    #[error("column {col} is constant; cannot standardize")]
    ConstantColumn { col: usize },

    /// The solve hit a column linearly dependent on the ones before it.
    #[error("rank-deficient design: column {col} is linearly dependent on preceding columns")]
    RankDeficient { col: usize },

    /// Vector/matrix sizes do not line up.
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    /// A dependency target names a term that is not in the term list.
    #[error("unknown term {name:?} referenced by dependency structure")]
    UnknownTerm { name: String },

    /// A term never entered the model because the path stopped early.
    #[error("term {term:?} never entered the model (path stopped early)")]
    TermNeverEntered { term: String },

    /// A factor group violates its structural invariants.
    #[error("invalid factor group {factor:?}: {reason}")]
    InvalidFactorGroup { factor: String, reason: String },

    /// A configuration value is out of its allowed range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
