use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error(transparent)]
    Core(#[from] frugal_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl CliError {
    /// Stable identifier used in machine-readable error records.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "syntax",
            CliError::Validation(_) => "validation",
            CliError::Params(_) => "params",
            CliError::Core(_) => "core",
            CliError::Io { .. } => "io",
            CliError::Serialize(_) => "serialize",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
