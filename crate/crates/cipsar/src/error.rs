use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: cipsar_core::Error,
    },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}

impl CliError {
    /// 2 config, 3 numeric, 4 verification, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::Verification(_) => 4,
            CliError::Io { .. } | CliError::Format { .. } => 1,
        }
    }

    pub fn numeric(context: impl Into<String>) -> impl FnOnce(cipsar_core::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Numeric { context, source }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
