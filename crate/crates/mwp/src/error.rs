use std::io;
use std::path::{Path, PathBuf};

/// Parse failures of the binary file formats.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("not a {kind} file: magic {found:?}, expected {expected:?}")]
    BadMagic {
        kind: &'static str,
        expected: String,
        found: String,
    },
    #[error("unsupported {kind} format version {found} (this build reads version {supported})")]
    UnsupportedVersion {
        kind: &'static str,
        found: u32,
        supported: u32,
    },
    #[error("truncated {kind} file: {needed} bytes required, {available} present")]
    Truncated {
        kind: &'static str,
        needed: usize,
        available: usize,
    },
    #[error("{kind} file has {extra} unexpected trailing bytes")]
    TrailingBytes { kind: &'static str, extra: usize },
    #[error("invalid {kind} file: {reason}")]
    Invalid { kind: &'static str, reason: String },
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] mwp_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        Error::Csv {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Stable machine-readable tag printed before the message.
    pub fn category(&self) -> &'static str {
        use mwp_core::Error as C;
        match self {
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
            Error::Csv { .. } => "csv",
            Error::Config(_) => "config",
            Error::Core(e) => match e {
                C::LengthNotMultipleOf16 { .. } => "length-rule",
                C::NonFiniteLoss { .. } | C::NonFiniteGradient { .. } | C::NonFinite(_) => "numeric",
                C::TooFewPoints { .. } => "too-few-points",
                C::Shape(_) | C::LengthMismatch { .. } | C::StaleCache => "shape",
                _ => "invalid-input",
            },
        }
    }
}
