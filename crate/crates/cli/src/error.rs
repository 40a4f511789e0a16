use std::fmt;

use duffing_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Config,
    Numerical,
    Budget,
    Io,
}

/// Error carrying the process exit status: 2 config, 3 numerical failure,
/// 4 history budget exceeded. IO failures also exit with 3.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: ExitKind::Config, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { kind: ExitKind::Io, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ExitKind::Config => 2,
            ExitKind::Numerical | ExitKind::Io => 3,
            ExitKind::Budget => 4,
        }
    }

    /// Prefixes the message with what was being done.
    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::InvalidArgument(_) | Error::InvalidGrid(_) | Error::GridCoverage { .. } => ExitKind::Config,
            Error::HistoryBudget { .. } => ExitKind::Budget,
            Error::NumericalOverflow(_)
            | Error::TruncationUnsafe { .. }
            | Error::TruncationOverflow { .. }
            | Error::StepSizeFailure { .. }
            | Error::UndefinedDecoherenceTime(_) => ExitKind::Numerical,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::io(e.to_string())
    }
}
