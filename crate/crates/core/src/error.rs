use thiserror::Error;

use crate::partitions::Subset;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),

    #[error("operands live over different fields ({0} vs {1})")]
    FieldMismatch(String, String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),

    #[error("tables have mismatched domains ({0} vs {1})")]
    DomainMismatch(usize, usize),

    #[error("input family is linearly dependent")]
    Dependent,

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition family must be non-empty")]
    EmptyFamily,

    #[error("ground sets differ: {0} vs {1}")]
    GroundMismatch(Subset, Subset),

    #[error("refusing to enumerate partitions of a {0}-element set (limit 8)")]
    EnumerationLimit(usize),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("tensor with {entries} entries exceeds the limit of {limit}")]
    EntryLimit { entries: u128, limit: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index out of bounds: {0}")]
    OutOfBounds(String),

    #[error("decomposition term does not match its family: {0}")]
    TermNotInFamily(String),

    #[error("family is not finer than the target family")]
    NotFiner,

    #[error("the decomposition does not evaluate to the expected tensor")]
    EvaluationMismatch,

    #[error("split set {given} is not J_max = {expected}")]
    NotMaximal { given: Subset, expected: Subset },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("internal invariant violated: {0}")]
    InvariantBreach(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
