//! `ito-lab`: reproducible pipelines over the `itolab` library.
//!
//! Exit codes: 0 success, 1 malformed command line, 2 input validation
//! failure, 3 numerical failure.

mod args;
mod commands;
mod error;
mod output;

use std::ffi::OsString;

use clap::Parser;

pub use args::Cli;
pub use error::CliError;

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ito-lab: {e}");
            e.exit_code()
        }
    }
}
