//! File formats, configuration, and the Monte Carlo experiment harness
//! behind the `fsb` command-line tool.

pub mod config;
pub mod experiment;
pub mod io;

/// Errors from the harness layer: IO, format, configuration, and
/// propagated library errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Fsb(#[from] fsb::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("experiment: {0}")]
    Experiment(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn format(path: &std::path::Path, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }
}
