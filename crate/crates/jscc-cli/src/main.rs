//! `jscc` — command-line front end for the recursive-quantization AWGN
//! scheme.
//!
//! Four subcommands cover the workflows: `simulate` runs one (n, snr, eps)
//! operating point, `sweep` runs a dB grid and appends a scaling-fit summary,
//! `bounds` evaluates the lower-bound curves without simulating, and
//! `solve-eps` prints the resolution-schedule solution at one snr. Output is
//! CSV (17 significant digits, '\n' line endings) or a JSON-lines mirror with
//! the same field names; every file written gets a `<out>.manifest.json`
//! sidecar recording the resolved configuration, seed and tool version so a
//! run can be reproduced byte-for-byte.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

mod cli;
mod commands;
mod emit;

use std::process::ExitCode;

/// Failures split by exit code: bad flags/domain (2) vs runtime (1).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<jscc_core::Error> for CliError {
    fn from(e: jscc_core::Error) -> Self {
        match e {
            // Domain violations are misuse of the interface, not failures of
            // the tool: surface them like flag errors.
            jscc_core::Error::InvalidArgument(_) | jscc_core::Error::InvalidConfig(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    // clap renders its own usage errors (exit 2) and help/version (exit 0)
    // inside parse(); everything surfacing here carries an exit code.
    match cli::parse().and_then(commands::dispatch) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
