//! `trilab`: batch verification front end.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, LabTask};
use report::Sink;

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.opts.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let opts = &cli.opts;
    let sink = Sink::new(opts.out.clone())?;
    match &cli.command {
        Command::Check { system, mode } => commands::check(opts, system, *mode, &sink),
        Command::Complete { system } => commands::complete(opts, system, &sink),
        Command::Lab { task } => match task {
            LabTask::Seminorm { op, rows, cols, liminal, index } => {
                commands::seminorm(opts, op, rows, cols, liminal.zip(*index), &sink)
            }
            LabTask::Membership { system, op } => commands::lab_membership(opts, system, op, &sink),
            LabTask::Witness { which } => commands::witness(opts, which, &sink),
            LabTask::Inequality { r, samples, density } => commands::inequality(opts, *r, *samples, *density, &sink),
        },
        Command::Demo { example, cut } => commands::demo(opts, *example, cut.as_deref(), &sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
