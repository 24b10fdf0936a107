use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] mahler_core::Error),
    /// A library invariant was violated while running the command.
    #[error("internal precondition failed: {0}")]
    Panic(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Core(mahler_core::Error::Parse { .. }) => EXIT_PARSE,
            CliError::Core(_) | CliError::Panic(_) => EXIT_PRECONDITION,
        }
    }
}
