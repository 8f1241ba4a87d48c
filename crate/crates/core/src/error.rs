use thiserror::Error;

/// Errors raised by the exact and numeric engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("argument must be strictly positive, got {0}")]
    NonPositiveArgument(String),

    #[error("composition parts sum to {actual}, expected {expected}")]
    CompositionSumMismatch { expected: u64, actual: u64 },

    #[error("cannot split a positive total into zero parts")]
    ZeroParts,

    #[error("cannot add values carrying sqrt(pi)^{left} and sqrt(pi)^{right}")]
    IncompatiblePiPowers { left: i64, right: i64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("enumeration needs {required} paths but the budget is {budget}")]
    BudgetExceeded { required: String, budget: u64 },

    #[error("rank {rank} is out of range for a stream of {len} items")]
    RankOutOfRange { rank: u64, len: u64 },

    #[error("enumeration too large to index: {0}")]
    TooLarge(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
