use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The configuration or the command line is inconsistent; nothing ran.
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] softrgg_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl HarnessError {
    /// True for errors caused by bad input rather than by a failed run.
    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
