mod commands;
mod config;

use clap::{Parser, Subcommand};

/// Entailment-based evaluation of open-domain QA answers.
#[derive(Parser)]
#[command(name = "entail-eval", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert question/answer pairs into declarative statements
    Convert(commands::ConvertArgs),
    /// Run the full evaluation pipeline over a dataset
    Evaluate(commands::EvaluateArgs),
    /// Repeat the pipeline under several seeds and measure agreement
    Reliability(commands::ReliabilityArgs),
    /// Recompute the ordering significance tests from a saved report
    Ordering(commands::OrderingArgs),
    /// Report per-item partial marks
    Partial(commands::PartialArgs),
    /// Recompute report aggregates, or score text files with BLEU/ROUGE
    Metrics(commands::MetricsArgs),
    /// Inspect and maintain transcript caches
    #[command(subcommand)]
    Cache(commands::CacheCommand),
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Convert(args) => commands::convert(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::Reliability(args) => commands::reliability(args),
        Command::Ordering(args) => commands::ordering(args),
        Command::Partial(args) => commands::partial(args),
        Command::Metrics(args) => commands::metrics(args),
        Command::Cache(command) => commands::cache(command),
    }
}
