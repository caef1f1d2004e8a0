use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{file}:{line}:{column}: {message}")]
    Input {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}: {message}")]
    Io { file: String, message: String },
    #[error(transparent)]
    Solver(#[from] gencol::Error),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            file: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solver(gencol::Error::GuardExceeded { .. }) => crate::EXIT_GUARD,
            _ => crate::EXIT_INPUT,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
