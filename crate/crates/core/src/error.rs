use thiserror::Error;

/// Errors surfaced by the library.
///
/// The variants map onto the CLI exit codes: `Usage` and `Format` are input
/// errors, `Budget` is an explicit refusal, `Inconsistency` is a tripwire that
/// must never fire in a correct build.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("search cancelled")]
    Cancelled,
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
