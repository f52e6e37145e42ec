//! `ggmid`: structure identification for Gaussian graphical models.
//!
//! Exit status: 0 when the verdict holds (or a utility command succeeded),
//! 1 when it does not, 2 on any error.

mod bench;
mod gen;
mod identify;
mod io;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::identify::{Command as Check, OracleArgs};

#[derive(Parser, Debug)]
#[command(name = "ggmid", version, about = "Identify sparse Gaussian graphical models from covariances or samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether every node has at most k neighbours.
    CheckDegree {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Decide whether the graph is strongly k-separable.
    CheckStrongSep {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// List every size-ℓ node set whose removal leaves a strongly
    /// k-separable graph.
    FindFvs {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Write a synthetic model bundle.
    Gen(gen::GenArgs),
    /// Draw zero-mean Gaussian samples from a covariance file.
    Sample(gen::SampleArgs),
    /// Sweep success rates over node counts and sample sizes as CSV.
    Bench(bench::BenchArgs),
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::CheckDegree { k, oracle } => identify::run(Check::Degree, k, &oracle),
        Command::CheckStrongSep { k, oracle } => identify::run(Check::StrongSep, k, &oracle),
        Command::FindFvs { k, ell, oracle } => identify::run(Check::Fvs { ell }, k, &oracle),
        Command::Gen(args) => gen::run(&args).map(|_| true),
        Command::Sample(args) => gen::sample(&args).map(|_| true),
        Command::Bench(args) => bench::run(&args).map(|_| true),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
