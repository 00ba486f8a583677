use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid sizes, flags, paths or combinations of options.
    #[error("configuration error: {0}")]
    Config(String),

    /// A gate or operation that is not defined for the current state.
    #[error("invalid operation: {0}")]
    InvalidOperation(String),

    /// Probability vectors that do not sum to one, non-finite values, etc.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("singular calibration: {0}")]
    Singular(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Failure while processing one (frame, pair) unit of the pipeline.
    #[error("frame {frame}, pair {pair}: {source}")]
    Task {
        frame: usize,
        pair: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// True for errors caused by the caller's input rather than by a failure
    /// during execution. The CLI maps these to exit code 2.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::Config(_) | Error::Encoding(_) | Error::Parse { .. } | Error::Dimension(_) => {
                true
            }
            Error::Task { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}
