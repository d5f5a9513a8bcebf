//! CLI error type with the fixed exit-code contract: 0 success, 1 invariant
//! failure, 2 usage or input problems, 3 numerical failures.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag combinations or malformed values.
    Usage(String),
    /// Unreadable or malformed input data.
    Input(String),
    /// Rank deficiency or a path that could not be completed.
    Numerical(String),
    /// One or more validation invariants failed.
    CheckFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed => 1,
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::CheckFailed => write!(f, "one or more invariants failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hlars_core::Error> for CliError {
    fn from(e: hlars_core::Error) -> Self {
        match e {
            hlars_core::Error::RankDeficient { .. } | hlars_core::Error::TermNeverEntered { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
