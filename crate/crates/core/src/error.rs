use thiserror::Error;

/// Errors produced by the rendezvous laboratory.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("the game needs at least 2 locations, got n = {0}")]
    TooFewLocations(usize),

    #[error("itinerary has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },

    #[error("location {location} out of range 1..={n}")]
    LocationOutOfRange { location: usize, n: usize },

    #[error("binding is not a permutation of 1..={0}")]
    NotAPermutation(usize),

    #[error("location counts differ: {0} vs {1}")]
    MismatchedN(usize, usize),

    #[error("strategy weights must be non-negative and sum to 1 (sum is {0})")]
    BadWeights(String),

    #[error("strategy has neither a support table nor a sampler")]
    EmptyStrategy,

    #[error("strategy '{0}' has no explicit support table; exact evaluation unavailable")]
    NoSupportTable(String),

    #[error("exact-mode cap exceeded: {what} = {value} > {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
