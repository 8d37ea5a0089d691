use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no complement: the {count} input vectors span all of R^{dim}")]
    NoComplement { count: usize, dim: usize },
    #[error("entry ({row}, {col}) = {value} outside declared bounds [{lo}, {hi}]")]
    OutOfBounds {
        row: usize,
        col: usize,
        value: String,
        lo: String,
        hi: String,
    },
    #[error("invalid bounds: lo {lo} > hi {hi}")]
    InvalidBounds { lo: String, hi: String },
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("negative tolerance")]
    NegativeEpsilon,
    #[error("{0} requires exact rational arithmetic")]
    ExactOnly(&'static str),
    #[error("game too large for the exact solver: K = {k} > {limit}")]
    TooLarge { k: usize, limit: usize },
    #[error("argument out of range: {0}")]
    InvalidArgument(String),
    #[error("session already finalized")]
    SessionClosed,
    #[error("query budget exceeded: round {round} > horizon {horizon}")]
    BudgetExceeded { round: usize, horizon: usize },
    #[error("oracle inconsistency: {0}")]
    Inconsistent(String),
    #[error("inconsistent observation: {0}")]
    InconsistentObservation(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
