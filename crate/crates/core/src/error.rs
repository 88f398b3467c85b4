use thiserror::Error;

/// Errors raised by cover algebra, lifting and the exact oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("knapsack row has no items")]
    EmptyRow,
    #[error("item {index} has non-positive weight {weight}")]
    NonPositiveWeight { index: usize, weight: i64 },
    #[error("capacity must be positive, got {0}")]
    NonPositiveCapacity(i64),
    #[error("item {index} has weight {weight} exceeding capacity {capacity}")]
    ItemExceedsCapacity { index: usize, weight: i64, capacity: i64 },
    #[error("index {index} out of range for a row with {len} items")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("not a cover: total weight {weight} does not exceed capacity {capacity}")]
    NotACover { weight: i64, capacity: i64 },
    #[error("cover is not minimal: removing item {witness} leaves weight {remaining} > capacity {capacity}")]
    NotMinimal { witness: usize, remaining: i64, capacity: i64 },
    #[error("argument {value} outside [0, {capacity}]")]
    OutOfDomain { value: String, capacity: i64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("enumeration budget exceeded: {what} is {got}, limit {limit}")]
    BudgetExceeded { what: &'static str, got: usize, limit: usize },
    #[error("invalid piecewise function: {0}")]
    InvalidPiecewise(String),
}

pub type Result<T, E = CoverError> = std::result::Result<T, E>;
