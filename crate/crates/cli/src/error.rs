use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {message}", path.display())]
    InvalidFile { path: PathBuf, message: String },
    #[error("{0}")]
    Validation(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn invalid(path: &Path, message: impl ToString) -> Self {
        CliError::InvalidFile {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }

    /// 1 for bad input, 2 for I/O, 3 for protocol failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::InvalidFile { .. } | CliError::Validation(_) => 1,
            CliError::Read { .. } | CliError::Write { .. } | CliError::Io(_) => 2,
            CliError::Protocol(_) => 3,
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
