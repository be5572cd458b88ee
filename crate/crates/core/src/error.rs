use thiserror::Error;

/// Errors raised by the polynomial kernel, map and algebra constructors, and
/// the file-format readers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("denominator {0} is not invertible in the ground field")]
    NonInvertibleDenominator(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different variable contexts")]
    ContextMismatch,
    #[error("index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid variable context: {0}")]
    InvalidContext(String),
    #[error("linear part at the origin is singular")]
    SingularLinearPart,
    #[error("map is not normalized (constant terms must vanish and the linear part must be the identity)")]
    NotNormalized,
    #[error("polynomial is not exactly divisible")]
    NotDivisible,
    #[error("characteristic {characteristic} does not allow polarizing degree {degree}")]
    CharacteristicObstruction { characteristic: u64, degree: u32 },
    #[error("form is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("map has degree {0}, expected at most 3")]
    DegreeTooHigh(u32),
    #[error("exponent schedule grows too slowly: {0}")]
    ScheduleTooSlow(String),
    #[error("unknown corpus entry `{0}`")]
    UnknownName(String),
    #[error("malformed parameters: {0}")]
    MalformedParameters(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
