//! `qrap`: sweeps, counts and reports for residue patterns in progressions.
//!
//! Exit status: 0 on success, 1 when `--assert` finds a violation, 2 on a
//! usage, spec or range error.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qrap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
