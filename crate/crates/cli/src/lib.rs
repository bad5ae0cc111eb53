//! Library side of the `coalesce` binary: argument types, subcommands and
//! output writers.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical
//! failure, 4 acceptance failure.

pub mod args;
mod commands;
pub mod output;

use std::io::Write;
use std::path::Path;

use coalesce_core::{Error, ErrorClass};

pub use args::Cli;
pub use commands::run;

/// Environment variable for the worker thread count.
pub const THREADS_ENV: &str = "COALESCE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} acceptance criteria failed")]
    Acceptance { failed: usize },
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.class() == ErrorClass::Numeric => 3,
            CliError::Acceptance { .. } => 4,
            _ => 2,
        }
    }
}

/// Sets the global rayon pool size once; later calls are ignored.
pub fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage(format!("{THREADS_ENV} must be at least 1")));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses arguments, runs, reports errors on stderr and returns the exit
/// code.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure_threads(cli.threads).and_then(|()| run(cli.command, out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
