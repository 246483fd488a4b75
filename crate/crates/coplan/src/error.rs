//! Error type shared across the crate.

use std::fmt;
use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// Invalid configuration: bad key/value, dimension mismatch, inconsistent inputs.
    Config(String),
    /// A selection vector is malformed (missing, duplicate or out-of-range entries).
    InvalidSelection(String),
    /// A data file could not be parsed. Carries the offending file and line (1-based).
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    /// Satisfaction rate requested over zero trials.
    UndefinedRate,
    /// Exhaustive enumeration would exceed the configured combination cap.
    CombinationCapExceeded { combinations: u128, cap: u128 },
    /// I/O failure, annotated with the path involved.
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::InvalidSelection(msg) => write!(f, "invalid selection: {msg}"),
            Error::Parse {
                path,
                line,
                message,
            } => write!(
                f,
                "parse error in {} line {line}: {message}",
                path.display()
            ),
            Error::UndefinedRate => write!(f, "satisfaction rate is undefined for zero trials"),
            Error::CombinationCapExceeded { combinations, cap } => write!(
                f,
                "combination count {combinations} exceeds enumeration cap {cap}"
            ),
            Error::Io { path, source } => write!(f, "i/o error on {}: {source}", path.display()),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
