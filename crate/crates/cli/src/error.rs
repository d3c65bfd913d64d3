use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] brier_core::Error),

    #[error("{0}")]
    Usage(String),

    #[error("missing results: {0}")]
    Missing(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for invalid input or configuration, 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_runtime() => 3,
            CliError::Io { .. } => 3,
            _ => 2,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
