use std::fmt;
use std::process::ExitCode;

use lexalign::report::ReportError;

/// Failure of a subcommand, split by exit code: bad input is 1, anything
/// that breaks while computing or writing is 2.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(1),
            CliError::Runtime(_) => ExitCode::from(2),
        }
    }

    pub fn invalid(e: impl fmt::Display) -> Self {
        CliError::Validation(e.to_string())
    }

    pub fn runtime(e: impl fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Config(_) | ReportError::Read { .. } | ReportError::Data(_) => {
                CliError::invalid(e)
            }
            ReportError::Io { .. }
            | ReportError::Rdm { .. }
            | ReportError::Stats { .. }
            | ReportError::Ablation { .. } => CliError::runtime(e),
        }
    }
}
