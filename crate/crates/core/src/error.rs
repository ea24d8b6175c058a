use thiserror::Error;

/// Errors raised by the symbolic engine and the model language.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two operands live on different charts (or variable sets).
    #[error("chart mismatch: `{left}` vs `{right}`")]
    ChartMismatch { left: String, right: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("division by zero")]
    ZeroDenominator,

    /// A structurally invalid request: wrong degree, index out of range, wrong chart kind.
    #[error("{0}")]
    Structural(String),

    /// Two computations of the same object that should agree did not.
    #[error("convention mismatch in {context}: {detail}")]
    Convention { context: String, detail: String },

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: unknown identifier `{name}`")]
    UnknownIdentifier { line: usize, name: String },

    #[error("line {line}: duplicate definition of `{name}`")]
    Duplicate { line: usize, name: String },

    #[error("line {line}: index {index} out of range 1..={max}")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        max: usize,
    },

    #[error("line {line}: {message}")]
    InvalidEntry { line: usize, message: String },

    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
