use thiserror::Error;

use crate::field::FieldTag;

/// Crate-wide error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field {0} is not finite")]
    InfiniteField(FieldTag),
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed field tags: {0} vs {1}")]
    MixedFields(FieldTag, FieldTag),
    #[error("{0} is not prime or exceeds the supported bound 13")]
    InvalidPrime(u32),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{0}! is not invertible in characteristic {1}")]
    BadCharacteristic(usize, u32),
    #[error("rank-one term {0} has a zero factor")]
    ZeroFactor(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unsupported field {0}: {1}")]
    UnsupportedField(FieldTag, String),
    #[error("tensor is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("wrong shape: {0}")]
    WrongShape(String),
    #[error("substitution matrix is singular")]
    SingularSubstitution,
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("no invertible slice combination in the pencil")]
    SingularPencil,
    #[error("invalid epsilon: {0}")]
    BadEpsilon(String),
    #[error("did not converge within {0} iterations")]
    DidNotConverge(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
