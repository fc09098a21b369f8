use std::path::PathBuf;

use smgo::SmgoError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Optimizer(#[from] SmgoError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("write failed: {0}")]
    Write(#[source] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("no trial records to summarize")]
    EmptyRecords,
    #[error("trial {trial} has {got} rows, expected {expected}")]
    RaggedRecords {
        trial: usize,
        expected: usize,
        got: usize,
    },
    #[error("cannot plot an empty summary")]
    EmptySummary,
    #[error("log-scale plot needs positive values, found {0}")]
    NonPositiveLog(f64),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
