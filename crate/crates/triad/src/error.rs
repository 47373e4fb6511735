use std::path::Path;
use std::process::ExitCode;

/// Failure of a subcommand, split by who is at fault.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input, bad flags or an unreadable file. Exit code 1.
    #[error("{0}")]
    Validation(String),

    /// A check the toolkit itself should never fail. Exit code 2.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(1),
            CliError::Internal(_) => ExitCode::from(2),
        }
    }

    pub fn in_file(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{}: {err}", path.display()))
    }
}

impl From<triad_core::Error> for CliError {
    fn from(err: triad_core::Error) -> Self {
        CliError::Validation(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Fail with exit code 2 unless `cond` holds.
pub fn ensure(cond: bool, what: impl FnOnce() -> String) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Internal(what()))
    }
}
