//! Crate-wide error type with process exit-code mapping.

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library and the CLI.
///
/// The variants mirror the CLI exit codes: usage problems exit 1, data
/// problems exit 2, numeric failures exit 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid arguments, configuration values, or call contracts.
    #[error("usage error: {0}")]
    Usage(String),
    /// Malformed or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),
    /// Divergence or other numeric breakdown during training or inference.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Underlying filesystem failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// CSV encoding failure while writing a table.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    /// Malformed JSON in a config, checkpoint, or report file.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Builds a [`Error::Usage`] from anything displayable.
    pub fn usage(msg: impl std::fmt::Display) -> Self {
        Error::Usage(msg.to_string())
    }

    /// Builds a [`Error::Data`] from anything displayable.
    pub fn data(msg: impl std::fmt::Display) -> Self {
        Error::Data(msg.to_string())
    }

    /// Builds a [`Error::Numeric`] from anything displayable.
    pub fn numeric(msg: impl std::fmt::Display) -> Self {
        Error::Numeric(msg.to_string())
    }

    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Data(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 2,
            Error::Numeric(_) => 3,
        }
    }
}
