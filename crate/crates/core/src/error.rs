use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Input exceeds a size guard (vertex cap, dense-oracle limit).
    #[error("input too large: {0}")]
    TooLarge(String),

    #[error("allocation failed: {0}")]
    Resource(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("malformed compressed graph: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Reserves `additional` slots, mapping allocator failure to [`Error::Resource`].
pub(crate) fn try_reserve<T>(v: &mut Vec<T>, additional: usize, what: &str) -> Result<()> {
    v.try_reserve(additional)
        .map_err(|e| Error::Resource(format!("{what}: {e}")))
}
