//! `stocknet`: tick data to correlation and mutual-information networks.

mod config;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use config::PipelineConfig;
use stages::Run;

#[derive(Parser)]
#[command(name = "stocknet", version, about = "Stock interaction networks from tick data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML pipeline configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Restrict stages to one period.
    #[arg(long, global = true)]
    period: Option<String>,
    /// Restrict networks to one distance.
    #[arg(long, global = true, value_enum)]
    method: Option<Method>,
    /// Abort on the first malformed tick row.
    #[arg(long, global = true)]
    strict: bool,
    /// Output directory (overrides the config; default `out`).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Ticks to per-period return panels.
    Ingest,
    /// Pair statistics and distance matrices.
    Pairs,
    /// Correlation spectra, surrogate check and leading eigenvectors.
    Rmt,
    /// Spanning trees with degree and centrality reports.
    Network,
    /// Synthetic tick data with ground truth.
    Synth,
    /// Run every stage and write a manifest.
    Report,
}

#[derive(ValueEnum, Clone, Copy)]
enum Method {
    Corr,
    Mi,
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let out = cli.out_dir.or_else(|| config.out_dir.clone()).unwrap_or_else(|| "out".into());
    let seed = cli.seed.unwrap_or(config.seed);
    let method = cli.method.map(|m| match m {
        Method::Corr => "corr".to_string(),
        Method::Mi => "mi".to_string(),
    });
    let run = Run::new(config, out, seed, cli.period, method, cli.strict);
    match cli.command {
        Command::Ingest => stages::ingest(&run),
        Command::Pairs => stages::pairs(&run),
        Command::Rmt => stages::rmt(&run),
        Command::Network => stages::network(&run),
        Command::Synth => stages::synth(&run),
        Command::Report => stages::report(&run),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
