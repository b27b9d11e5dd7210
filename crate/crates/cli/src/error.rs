//! Error-to-exit-code policy.
//!
//! Every failure leaves the process through one of four codes: 2 for
//! anything wrong with the request (bad flags, invalid parameters, an
//! engine that cannot handle the family, an enumeration that could not
//! be completed as asked), 3 for an eigensolver that ran out of
//! iterations, 4 for a violated invariant or a failed verification, and
//! 1 for plain I/O trouble. Success is 0 even when the report itself
//! carries bad news, except for `verify` and `theorem`, which signal a
//! failed check through code 4 after printing the full report.

use cmc_index::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Io(std::io::Error),
    /// Cross-field argument validation, same exit code as clap errors.
    Usage(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e {
                CoreError::Parameter(_) => "parameter",
                CoreError::DegenerateChart(_) => "degenerateChart",
                CoreError::UnsupportedFamily(_) => "unsupportedFamily",
                CoreError::Convergence { .. } => "convergence",
                CoreError::IncompleteEnumeration(_) => "incompleteEnumeration",
                CoreError::InvariantViolation(_) => "invariantViolation",
            },
            CliError::Io(_) => "io",
            CliError::Usage(_) => "parameter",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(e) => e.to_string(),
            CliError::Usage(msg) => msg.clone(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::Parameter(_)
                | CoreError::DegenerateChart(_)
                | CoreError::UnsupportedFamily(_)
                | CoreError::IncompleteEnumeration(_) => 2,
                CoreError::Convergence { .. } => 3,
                CoreError::InvariantViolation(_) => 4,
            },
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}
