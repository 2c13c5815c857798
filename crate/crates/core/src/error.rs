use thiserror::Error;

/// Errors surfaced by the library. Propagation *failure* (an emptied domain)
/// is not an error: it is a normal search outcome reported through
/// [`crate::state::PropagationResult`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported TSPLIB input: {0}")]
    UnsupportedFormat(String),

    #[error("assignment problem is infeasible: {0}")]
    InfeasibleAssignment(String),

    #[error("enumeration bound exceeded: tree has {total} leaves, bound is {bound}")]
    SizeBoundExceeded { total: u64, bound: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
