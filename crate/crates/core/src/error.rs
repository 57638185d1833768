use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document. `at` names the position ("line 3", "edge #2").
    #[error("parse error at {at}: {msg}")]
    Parse { at: String, msg: String },

    #[error("vertex {vertex} out of range 1..={n} at {at}")]
    VertexOutOfRange { vertex: i64, n: usize, at: String },

    #[error("self-loop on vertex {vertex} at {at}")]
    SelfLoop { vertex: i64, at: String },

    #[error("vertex count {n} not supported (must be between 1 and {cap})")]
    VertexCount { n: usize, cap: usize },

    #[error("n = {n} exceeds the coefficient table cap of {cap} vertices")]
    TableCap { n: usize, cap: usize },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("probability at vertex {vertex} is {value}, outside [0, 1]")]
    InvalidProbability { vertex: usize, value: String },

    #[error("weight at vertex {vertex} is {value}, must be positive")]
    NonPositiveWeight { vertex: usize, value: String },

    #[error("non-finite floating point value")]
    NonFinite,

    #[error("Shearer's condition fails at set {violating:?}; tight instance would have negative weights")]
    ShearerFails { violating: Vec<usize> },

    #[error("tight instance weight for {set:?} is negative although Shearer's condition holds")]
    NegativeTightWeight { set: Vec<usize> },

    #[error("conditional probability undefined: conditioning event has probability zero")]
    UndefinedConditional,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("maximum degree {d} is below 2")]
    DegreeTooSmall { d: usize },

    #[error("invalid probability space: {0}")]
    InvalidSpace(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
