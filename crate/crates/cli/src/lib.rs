//! Command implementations behind the `qinstr` binary. Each command returns
//! its primary output as text together with a pass flag.

pub mod commands;
pub mod format;
pub mod scenario_file;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] qinstr::Error),
}

impl CliError {
    /// 2 for usage, parse and i/o problems, 1 for failures inside the
    /// computation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(_) => 1,
            _ => 2,
        }
    }
}

/// Text produced by a command and whether every check it ran passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}
