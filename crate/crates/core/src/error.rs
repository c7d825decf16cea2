use thiserror::Error;

/// Errors raised by the workbench. Each variant maps onto one failure class
/// of the command-line exit-code table (usage, certification, resource,
/// accuracy).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid exponent p = {0}; need 1 <= p <= inf")]
    InvalidExponent(f64),

    #[error("exponent p = {p} is not handled by {routine}")]
    ExponentRouting { p: f64, routine: &'static str },

    #[error("duality map undefined for the zero element")]
    UndefinedDirection,

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("requested k = {requested} exceeds window K = {window}")]
    Window { requested: usize, window: usize },

    #[error("accuracy: {0}")]
    Accuracy(String),

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("rejected: {0}")]
    Rejected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
