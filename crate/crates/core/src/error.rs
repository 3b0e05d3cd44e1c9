use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("p = {0} is not an odd prime in the supported range")]
    InvalidPrime(u32),
    #[error("division by zero in F_p")]
    DivisionByZero,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("element does not belong to this shape: {0}")]
    ShapeMismatch(String),
    #[error("direction {direction} out of range 1..={max}")]
    DirectionOutOfRange { direction: usize, max: usize },
    #[error("operation requires a Z_2-homogeneous element")]
    MixedParity,
    #[error("shape has no distinguished odd variable x_(2n+1)")]
    NoDistinguishedVariable,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degree {0} is outside the truncated range")]
    DegreeOutOfRange(i32),
    #[error("ambient spaces differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("nilpotency policy lists no heights")]
    EmptyPolicy,
    #[error("quotient action is not well defined: {0}")]
    IllDefinedQuotient(String),
    #[error("cannot exponentiate: {0}")]
    ExpRefused(String),
    #[error("constructed map is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("model dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
}
