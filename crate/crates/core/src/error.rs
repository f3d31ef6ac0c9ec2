use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{dividend} is not divisible by {divisor}")]
    NotDivisible { dividend: String, divisor: String },
    #[error("expected a univariate polynomial, got variables {0:?}")]
    NotUnivariate(Vec<String>),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not invertible (det = {det})")]
    Singular { det: String },
    #[error("determinant must be 1, got {det}")]
    DeterminantNotOne { det: String },
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("block is not symmetric")]
    NotSymmetric,
    #[error("index out of range: {0}")]
    Index(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("factors do not alternate between lower and upper")]
    NotAlternating,
    #[error("{0}")]
    NoRoot(String),
    #[error("Bezout solve infeasible up to degree {cap}; the inputs probably share a zero")]
    BezoutInfeasible { cap: usize },
    #[error("sampling inadequate: {0}")]
    Resample(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
