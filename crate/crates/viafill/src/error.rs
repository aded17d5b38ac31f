use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration file or assembled configuration is invalid.
    #[error("config error: {0}")]
    Config(String),

    /// The numerical core failed (singular system, residual blow-up, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// An output file could not be written.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
