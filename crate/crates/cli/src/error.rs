use std::path::PathBuf;

use thiserror::Error;

/// Failures that stop a command before any check is evaluated.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("invalid scenario: {0}")]
    Scenario(#[from] timeop_core::Error),

    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
