use thiserror::Error;

/// Errors raised by the array, channel, optimization and reporting layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("degenerate pattern: {0}")]
    DegeneratePattern(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("problem too large for exhaustive search: {elements} elements (limit {limit})")]
    TooLarge { elements: usize, limit: usize },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Config(_) | Error::InvalidArgument(_) | Error::TooLarge { .. } => 2,
            Error::DegenerateGeometry(_) | Error::DegenerateChannel(_) => 3,
            Error::DegeneratePattern(_) => 4,
            Error::NonConvergence(_) => 5,
            Error::Trial { source, .. } => source.exit_code(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
