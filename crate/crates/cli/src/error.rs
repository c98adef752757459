use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Core(#[from] infreg::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Serialize(#[from] serde_json::Error),

    #[error("verification failed: {0}")]
    SuiteFailure(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// 2 for failed verification suites, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SuiteFailure(_) => 2,
            _ => 1,
        }
    }
}
