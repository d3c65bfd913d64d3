use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("empty input: {0} must contain at least one element")]
    Empty(&'static str),

    #[error("invalid {what} at index {index}: {value} is outside {domain}")]
    Validation {
        what: &'static str,
        index: usize,
        value: f64,
        domain: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration over 2^{n} outcomes exceeds the budget of n <= {max}")]
    Budget { n: usize, max: usize },

    #[error("empirical pool has {pool} values but {requested} were requested without replacement")]
    InsufficientPool { pool: usize, requested: usize },

    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the environment (I/O) rather than of the input.
    pub fn is_runtime(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
