use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}, line {line}: {message}")]
    Parse {
        context: String,
        line: usize,
        message: String,
    },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("grid alignment error: {0}")]
    Alignment(String),

    #[error("geometry error in polygon '{polygon}': {message}")]
    Geometry { polygon: String, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("undefined cost: {0}")]
    UndefinedCost(String),

    #[error("data quality error: {0}")]
    DataQuality(String),

    #[error("infeasible target: {message} (binding: {})", binding.join(", "))]
    Infeasible {
        message: String,
        binding: Vec<String>,
    },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("configuration invalid: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(context: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            line,
            message: message.into(),
        }
    }

    /// CSV failure on `path`; I/O problems keep their kind, the rest report the line.
    pub fn csv(path: &std::path::Path, e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
        if e.is_io_error() {
            if let csv::ErrorKind::Io(io) = e.into_kind() {
                return Error::io(path, io);
            }
            unreachable!()
        }
        Error::parse(path.display().to_string(), line, e.to_string())
    }
}
