mod args;
mod commands;
mod input;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

/// Exit status for bad flags, unreadable input and invalid arguments.
const EXIT_USAGE: u8 = 2;
/// Exit status for failures of the numerical machinery.
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Theory(a) => commands::theory(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Imse(a) => commands::imse(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err.chain().any(|cause| cause.downcast_ref::<mdep_core::Error>().is_some_and(|e| e.is_numerical()));
    if numerical {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}
