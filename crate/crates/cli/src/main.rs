mod args;
mod commands;
mod config;
mod corpus;
mod failure;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, SweepCommand};
use failure::{CliResult, Failure};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> CliResult {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::usage(format!("--threads: {e}")))?;
    }
    let file = config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(args) => commands::generate(args, &file),
        Command::Run(args) => commands::run(args, &file, cli.config.as_deref()),
        Command::Sweep(SweepCommand::Dtc(args)) => commands::sweep_dtc(args, &file),
        Command::Sweep(SweepCommand::Thresholds(args)) => commands::sweep_thresholds(args, &file),
        Command::Cost(args) => commands::cost(args, &file),
    }
}
