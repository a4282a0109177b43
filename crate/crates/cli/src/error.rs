use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid document: {0}")]
    Document(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Core(#[from] trellis_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Process exit status: 2 for unreadable input, 3 for violated
    /// preconditions, 4 when an enumeration cap is hit, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        use trellis_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Document(_) | CliError::Argument(_) => 2,
            CliError::Core(E::CapExceeded { .. }) => 4,
            CliError::Core(E::Malformed(_)) => 2,
            CliError::Core(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
