//! File formats, configuration and command implementations behind the
//! `perronlab` binary.

use std::fmt;
use std::path::Path;

use perron_core::Error;

pub mod cli;
pub mod commands;
pub mod config;
pub mod dto;
pub mod output;
pub mod render;

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SEARCH_FAILURE: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;

/// A failed command with the process exit code it maps to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        // unwritable output is an environment problem, reported like bad usage
        CliError {
            code: EXIT_USAGE,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Exit code for a core error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoWitnessFound { .. }
        | Error::SearchBudgetExceeded { .. }
        | Error::BudgetExceeded(_) => EXIT_SEARCH_FAILURE,
        Error::PrecisionExhausted(_) => EXIT_PRECISION,
        _ => EXIT_USAGE,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}
