use thiserror::Error;

/// Errors raised while building or solving contract design instances.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContractError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("technology has no non-trivial action (expected outcome must exceed cost for some action)")]
    NoNonTrivialAction,

    #[error("invalid team technology: {0}")]
    InvalidTeam(String),

    #[error("team technology is not productive: no slope vector with total slope <= 1 gives positive team utility")]
    NotProductive,

    #[error("contract does not define a payment for outcome {0}")]
    DomainMismatch(f64),

    #[error("invalid contract: {0}")]
    InvalidContract(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("slope {0} is at or beyond the singularity at 1")]
    Singularity(f64),

    #[error("degenerate case: {0}")]
    Degenerate(String),

    #[error("corner case: {0}")]
    Corner(String),

    #[error("enumeration limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("linear program error: {0}")]
    Lp(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = ContractError> = std::result::Result<T, E>;
