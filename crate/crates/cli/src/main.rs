mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qcartier_harness::Status;

use args::{Cli, Command};
use commands::{Output, UsageError};

fn run(cli: &Cli) -> anyhow::Result<Output> {
    let c = &cli.common;
    if let Some(jobs) = c.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| UsageError(format!("--jobs: {e}")))?;
    }
    match &cli.command {
        Command::Dict => commands::dict(c),
        Command::Sequence => commands::sequence(c),
        Command::Check { id } => commands::check(id, c),
        Command::Suite => commands::suite(c),
        Command::Bench => commands::bench(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if e.is::<UsageError>() { 2 } else { 1 });
        }
    };
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, &output.text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(output.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match output.status {
        Status::Pass | Status::Skipped => ExitCode::SUCCESS,
        Status::Fail => ExitCode::from(1),
    }
}
