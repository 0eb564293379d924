//! Library side of the `xnlplab` command: file formats, command bodies and
//! the verification sweeps.

pub mod commands;
pub mod formats;
pub mod report;
pub mod suites;

use std::fmt;

pub use report::{Answer, CaseRecord, Summary, VerificationReport};
pub use suites::{run_suite, Bounds, Suite};

/// Environment variable overriding the default expansion budget.
pub const BUDGET_ENV: &str = "XNLPLAB_BUDGET";

/// Failure of a command, carrying its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable input or malformed JSON: exit 2.
    Parse(String),
    /// Input parses but violates a precondition of the operation: exit 3.
    Precondition(String),
    /// A produced witness or a sweep failed verification: exit 4.
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    pub(crate) fn precondition(e: impl fmt::Display) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition violated: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
