use std::path::PathBuf;

use netres_core::agent::AgentError;
use netres_core::detector::DetectorError;
use netres_core::metrics::MetricsError;
use netres_core::netmodel::NetError;
use netres_core::sentinel::SentinelError;
use netres_core::traffic::TrafficError;

/// Errors from file handling and the pipeline. Each variant maps to a
/// process exit code through [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}, row {row}: {message}")]
    Row { path: PathBuf, row: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{stage}: {message}")]
    Stage { stage: String, message: String },
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error(transparent)]
    Sentinel(#[from] SentinelError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format { path: path.into(), message: message.to_string() }
    }

    /// Wraps a lower-level failure with the pipeline stage it came from.
    pub(crate) fn stage(stage: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Error::Stage { stage: stage.into(), message: err.to_string() }
    }

    /// 1 for bad input (configuration, malformed or invalid files), 2 for
    /// failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Stage { .. } => 2,
            Error::Agent(_) | Error::Detector(_) | Error::Metrics(_) => 2,
            Error::Format { .. } | Error::Row { .. } | Error::Config(_) => 1,
            Error::Net(_) | Error::Traffic(_) | Error::Sentinel(_) => 1,
        }
    }
}
