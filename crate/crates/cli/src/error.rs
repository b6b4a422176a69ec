use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation or configuration; nothing was run.
    #[error("configuration error: {0}")]
    Config(String),
    /// Failure while running or writing results.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {err}", path.display()))
    }
}

impl From<cluster_innovation::Error> for CliError {
    fn from(err: cluster_innovation::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}
