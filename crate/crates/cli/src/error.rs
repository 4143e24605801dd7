use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] sprt_efficiency::Error),

    #[error("{0}")]
    Usage(String),

    #[error("verification failed: {0} violating points")]
    Violations(usize),

    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 1 for failed checks and aborted simulations, 2 for bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(sprt_efficiency::Error::Capped { .. }) => 1,
            CliError::Lib(_) | CliError::Usage(_) => 2,
            CliError::Violations(_) | CliError::Io(_) => 1,
        }
    }
}
