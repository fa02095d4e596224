use thiserror::Error;

/// Errors raised by the core engine.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("knowledge base holds no cases")]
    NoCases,

    #[error("problem vector dimension {got} does not match knowledge base dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("case index {0} out of range")]
    BadCaseIndex(usize),

    #[error("fitness {0} outside [0, 1]")]
    FitnessOutOfRange(f64),

    #[error("demand must be positive, got {0}")]
    NonPositiveDemand(f64),

    #[error("user {0} has no serving node")]
    NoServingNode(String),

    #[error("instance too large: {combinations} placement sequences exceed the {limit} cap")]
    InstanceTooLarge { combinations: u128, limit: u128 },

    #[error("invalid MCS table: {0}")]
    InvalidMcsTable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("knowledge base file malformed: {0}")]
    KnowledgeBaseFormat(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
