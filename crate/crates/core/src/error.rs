use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {p}: {reason}")]
    InvalidModulus { p: u64, reason: &'static str },

    #[error("operands belong to different moduli ({left} vs {right})")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("{0} has no multiplicative inverse")]
    NotInvertible(u64),

    #[error("value {0} is outside the supported range")]
    OutOfRange(u64),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("f is a square: {0}")]
    SquarePolynomial(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("unknown built-in map `{0}`")]
    UnknownBuiltin(String),

    #[error("division by the zero rational function")]
    ZeroDenominator,

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("no points: {0}")]
    NoPoints(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
