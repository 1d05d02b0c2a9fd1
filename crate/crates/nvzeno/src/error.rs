use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] nvzeno_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} validation check(s) failed")]
    ValidationFailed(usize),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for bad input, 3 for numerical failure, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_input_error() => 2,
            CliError::Core(_) => 3,
            CliError::Io(_) | CliError::ValidationFailed(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
