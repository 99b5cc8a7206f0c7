mod cli;
mod commands;
mod io;
mod svg;
mod synthetic;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use crate::cli::{Cli, Command};

fn run(cli: Cli) -> Result<()> {
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global().context("cannot start the worker pool")?;
    match cli.command {
        Command::Distance(args) => commands::distance::run(&args),
        Command::Flow(args) => commands::flow::run(&args),
        Command::Colorize(args) => commands::colorize::run(&args),
        Command::Icp(args) => commands::icp::run(&args),
        Command::Bench(args) => commands::bench::run(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
