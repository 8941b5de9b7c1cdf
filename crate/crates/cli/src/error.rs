use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: malformed input: {reason}")]
    MalformedInput { path: PathBuf, reason: String },
    #[error("check failed")]
    CheckFailed,
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::CheckFailed => ExitCode::from(1),
            Self::Config(_) => ExitCode::from(2),
            Self::Io { .. } | Self::MalformedInput { .. } => ExitCode::from(3),
            Self::Run(_) => ExitCode::from(1),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
