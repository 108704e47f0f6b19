//! Command-line front-end for `walkwait-core`: scenario files, the
//! `decide`/`solve`/`simulate`/`sweep` commands, and CSV/JSON output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod parallel;

pub use cli::{Cli, Command};
pub use commands::run;
pub use config::ScenarioConfig;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] walkwait_core::Error),
    #[error("output: {0}")]
    Output(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(walkwait_core::Error::SolverFailure { .. }) => EXIT_SOLVER,
            _ => EXIT_USAGE,
        }
    }
}
