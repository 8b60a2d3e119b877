//! `gaci` — build the agriculture and climate pillars, aggregate the
//! 14-pillar competitiveness index, and write comparison, region, and
//! validity reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 input data rejected, 3
//! numeric or model failure.

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod config;
mod render;

use config::{CliError, RunConfig};

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version print to stdout and succeed; real
            // parse errors go to stderr and exit 1.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = RunConfig::resolve(&cli).and_then(|cfg| commands::run(&cfg, &cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
