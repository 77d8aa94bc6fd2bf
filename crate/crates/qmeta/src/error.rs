use std::process::ExitCode;

/// Splits failures into the two exit codes the CLI reports.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or inconsistent inputs, missing checkpoints.
    #[error("{0:#}")]
    Config(anyhow::Error),
    /// Anything that goes wrong after the inputs were accepted.
    #[error("{0:#}")]
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn config(msg: impl std::fmt::Display) -> Self {
        CliError::Config(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<qmeta_core::Error> for CliError {
    fn from(e: qmeta_core::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}
