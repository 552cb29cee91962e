//! `lissajous` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad arguments, 3 I/O
//! error, 4 capacity or infrastructure failure.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("{}", line.trim());
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::State(c) => commands::cmd_state(c),
        Command::Field(c) => commands::cmd_field(c),
        Command::Classical(c) => commands::cmd_classical(c),
        Command::Evolve(c) => commands::cmd_evolve(c),
        Command::Verify(c) => commands::cmd_verify(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
