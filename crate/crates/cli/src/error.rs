use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] lissajous_core::Error),
    #[error("verification failed: {0} check(s) did not pass")]
    VerificationFailed(usize),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        use lissajous_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::VerificationFailed(_) => 1,
            CliError::Core(E::InvalidParameter(_) | E::ZeroProjection { .. }) => 2,
            CliError::Core(_) => 4,
        }
    }
}
