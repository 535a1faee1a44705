use std::path::Path;

use thiserror::Error;

/// Everything that ends the process with the usage/validation exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("malformed document: {0}")]
    Parse(String),
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error("expected a {expected} document, found {found}")]
    WrongKind { expected: &'static str, found: &'static str },
    #[error(transparent)]
    Core(#[from] obsrel_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            Self::Parse(m) => Self::Parse(format!("{}: {m}", path.display())),
            Self::Invalid(m) => Self::Invalid(format!("{}: {m}", path.display())),
            e @ (Self::Core(_) | Self::WrongKind { .. }) => Self::Invalid(format!("{}: {e}", path.display())),
            other => other,
        }
    }
}
