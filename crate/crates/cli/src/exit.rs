//! Process exit codes.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | any other failure |
//! | 2 | usage or configuration error |
//! | 3 | the store failed verification |
//! | 4 | missing, unknown or insufficient credentials |
//! | 5 | the safekeeper could not be reached or did not store an entry |

use std::fmt;
use std::process::ExitCode;

use monitor_sdk::{GuardError, LoggingError, TransportError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    General = 1,
    Usage = 2,
    Verification = 3,
    Auth = 4,
    Transport = 5,
}

impl From<ExitClass> for ExitCode {
    fn from(c: ExitClass) -> Self {
        ExitCode::from(c as u8)
    }
}

#[derive(Debug)]
pub struct CliError {
    pub class: ExitClass,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn new(class: ExitClass, error: impl Into<anyhow::Error>) -> Self {
        CliError {
            class,
            error: error.into(),
        }
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        CliError::new(ExitClass::Usage, anyhow::anyhow!("{msg}"))
    }

    pub fn general(error: impl Into<anyhow::Error>) -> Self {
        CliError::new(ExitClass::General, error)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub fn transport_class(err: &TransportError) -> ExitClass {
    match err {
        TransportError::Rejected { status: 401 | 403, .. } => ExitClass::Auth,
        TransportError::Rejected { status: 400, .. } => ExitClass::Usage,
        TransportError::Rejected { .. } => ExitClass::General,
        _ => ExitClass::Transport,
    }
}

impl From<TransportError> for CliError {
    fn from(err: TransportError) -> Self {
        CliError::new(transport_class(&err), err)
    }
}

impl From<GuardError> for CliError {
    fn from(err: GuardError) -> Self {
        let class = match &err {
            GuardError::Logging(LoggingError::Failed { .. }) => ExitClass::Transport,
            _ => ExitClass::General,
        };
        CliError::new(class, err)
    }
}

pub type CliResult<T> = Result<T, CliError>;
