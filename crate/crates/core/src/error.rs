use thiserror::Error;

/// Errors produced by the decomposition, string and enumeration routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order must be at least 2, got {0}")]
    InvalidOrder(usize),

    #[error("no index >= {order} satisfies the bound (cap {cap:?})")]
    NotFound { order: usize, cap: Option<i64> },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("decomposition is empty")]
    Empty,

    #[error("block would hold {length} letters, above the cap of {cap}")]
    TooLarge { length: String, cap: u64 },

    #[error("scan of {requested} items exceeds the limit of {limit}")]
    ScanLimitExceeded { requested: String, limit: u64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
