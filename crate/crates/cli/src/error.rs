use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config error in {path}: {message}")]
    Config { path: String, message: String },

    #[error("{0}")]
    Internal(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for usage and config problems, 3 for internal-consistency failures,
    /// 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Internal(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<switchrun::Error> for CliError {
    fn from(e: switchrun::Error) -> Self {
        use switchrun::Error::*;
        match e {
            Domain(_) | Range { .. } | InvalidBit { .. } => CliError::Usage(e.to_string()),
            InternalConsistency(_) | Serialization(_) => CliError::Internal(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
