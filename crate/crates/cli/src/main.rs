//! `carousel`: train, tune, and compare recommenders under the
//! individual and carousel evaluation protocols.

mod commands;
mod config;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "carousel",
    about = "Offline evaluation of carousel recommendation pages",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Overrides shared by every subcommand; flags win over config values.
#[derive(Debug, Clone, Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "carousel.toml")]
    config: PathBuf,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the root seed (split and tuning).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the carousel length.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Override the row discount weight.
    #[arg(long, global = true)]
    w_row: Option<f64>,
    /// Override the column discount weight.
    #[arg(long, global = true)]
    w_col: Option<f64>,
    /// Override the fixed carousels (comma-separated model labels).
    #[arg(long, global = true, value_delimiter = ',')]
    fixed: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the train/validation/test partitions and their manifest.
    Split(Common),
    /// Train the configured models and save them.
    Train(Common),
    /// Random-search hyperparameters per model family.
    Tune {
        #[command(flatten)]
        common: Common,
        /// Families to tune (default: all personalized families).
        #[arg(long, value_delimiter = ',')]
        family: Option<Vec<String>>,
        /// Trials per family.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Evaluate all configured models under both protocols and write
    /// the comparison table, discount grid, and hit heatmaps.
    Evaluate(Common),
    /// Evaluate one candidate below a set of fixed carousels.
    EvaluatePage {
        #[command(flatten)]
        common: Common,
        /// Label of the candidate model.
        #[arg(long)]
        candidate: String,
    },
    /// Greedily assemble a page from the configured models.
    BuildPage {
        #[command(flatten)]
        common: Common,
        /// Number of carousels to select.
        #[arg(long, default_value_t = 2)]
        rows: usize,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .init();
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Split(common) => commands::split(&common),
        Command::Train(common) => commands::train(&common),
        Command::Tune { common, family, budget } => {
            commands::tune(&common, family.as_deref(), budget)
        }
        Command::Evaluate(common) => commands::evaluate(&common),
        Command::EvaluatePage { common, candidate } => {
            commands::evaluate_page(&common, &candidate)
        }
        Command::BuildPage { common, rows } => commands::build_page(&common, rows),
    }
}
