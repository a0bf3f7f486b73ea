//! File formats, run reports and the `dualtree` command line on top of
//! `dualtree-core`.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod data;
pub mod error;
pub mod report;
pub mod tree_json;

use std::ffi::OsString;

use clap::Parser;

pub use crate::error::{CliError, CliResult};

/// Parse `argv` (including the program name), run the command and return
/// the process exit code: 0 ok, 1 usage or input error, 2 contract or oracle
/// failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match cli::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dualtree: {e}");
            i32::from(e.exit_code())
        }
    }
}
