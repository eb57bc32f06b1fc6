use std::fmt;
use std::process::ExitCode;

use fourier_qml::Error;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config. Exit 2.
    Usage(String),
    /// A run diverged; outputs including the partial trace were written. Exit 3.
    Diverged(String),
    /// A size limit was hit. Exit 4.
    Capacity(String),
    /// Anything else at runtime. Exit 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Diverged(_) => 3,
            CliError::Capacity(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Diverged(m) => write!(f, "diverged: {m}"),
            CliError::Capacity(m) => write!(f, "capacity: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity(_) => CliError::Capacity(e.to_string()),
            Error::Training { .. } => CliError::Diverged(e.to_string()),
            Error::Io(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
