//! `relp`: stance detection from retweet structure and tweet text.
//!
//! Log verbosity comes from `RELP_LOG` (e.g. `RELP_LOG=info`); logs go to
//! standard error and never into output files.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunArgs;

#[derive(Debug, Parser)]
#[command(name = "relp", version, about)]
struct Cli {
    /// Worker threads for the data-parallel stages; 0 picks the core count.
    /// Outputs do not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate seed labels, train the classifier and label every user.
    Pipeline(RunArgs),
    /// Run baselines B1 (seed tweets), B2 (hashtags) and B3 (k-means).
    Baselines(RunArgs),
    /// Generate a synthetic two-sided corpus.
    Synth {
        /// TOML file of generator settings; defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        rng_seed: Option<u64>,
    },
    /// Write the retweet co-occurrence matrix.
    BuildMatrix(RunArgs),
    /// Run label propagation only.
    Propagate(RunArgs),
    /// Score a user stance file against gold labels.
    Evaluate {
        /// `user_id,stance,...` file with a header row.
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value = "custom")]
        method: String,
        /// Metrics CSV to merge the rows into.
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
}

#[cfg(feature = "parallel")]
fn init_threads(n: usize) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn init_threads(n: usize) -> anyhow::Result<()> {
    if n > 1 {
        log::warn!("built without the parallel feature; --threads {n} ignored");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads(cli.threads)?;
    match cli.command {
        Command::Pipeline(args) => commands::pipeline(&args.resolve()?),
        Command::Baselines(args) => commands::baselines(&args.resolve()?),
        Command::BuildMatrix(args) => commands::build_matrix(&args.resolve()?),
        Command::Propagate(args) => commands::propagate_only(&args.resolve()?),
        Command::Synth {
            config,
            out,
            rng_seed,
        } => commands::synth(config.as_deref(), &out, rng_seed),
        Command::Evaluate {
            pred,
            gold,
            method,
            metrics,
        } => commands::evaluate_file(&pred, &gold, &method, metrics.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RELP_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
