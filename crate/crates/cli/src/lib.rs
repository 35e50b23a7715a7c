//! Library half of the `parmol` command-line tool: config parsing and the
//! subcommand runner.  The binary in `main.rs` is a thin clap wrapper around
//! [`runner::run`]; everything testable lives here.

pub mod config;
pub mod runner;

use std::fmt;

/// Errors classified by exit code: 1 = configuration, 2 = computation,
/// 3 = I/O.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad config file, bad flag value, or physically invalid inputs.
    Config(String),
    /// A numerical routine failed on structurally valid inputs.
    Compute(String),
    /// Filesystem trouble reading the config or writing artifacts.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Compute(m) => write!(f, "compute: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Sort a core error into the config/compute taxonomy.  Domain violations and
/// data shortages arise while evaluating; everything else means the inputs
/// themselves were wrong.
pub fn classify(e: parmol::Error) -> CliError {
    match e {
        parmol::Error::Attributed { field, source } => match classify(*source) {
            CliError::Config(m) => CliError::Config(format!("{field}: {m}")),
            CliError::Compute(m) => CliError::Compute(format!("{field}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{field}: {m}")),
        },
        parmol::Error::Domain(_) | parmol::Error::InsufficientData(_) => {
            CliError::Compute(e.to_string())
        }
        _ => CliError::Config(e.to_string()),
    }
}
