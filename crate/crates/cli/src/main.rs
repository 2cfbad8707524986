mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use error::CliResult;

#[derive(Parser)]
#[command(name = "gaussep", version, about = "Separability and entanglement distribution experiments on three-mode Gaussian states")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config; missing fields take reference values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Covariance matrix file (JSON or whitespace text).
    #[arg(long, global = true)]
    gamma: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Samples per measurement setting.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Monte Carlo runs.
    #[arg(long, global = true)]
    runs: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Build the three-mode state, check its separability and distribute.
    Protocol,
    /// PPT_C against thermal noise for several preparation losses.
    Fig3,
    /// PPT values with detection losses subtracted.
    Fig4,
    /// PPT values with phase noise subtracted.
    Figs2,
    /// Statistical spread of the PPT values from simulated tomography.
    Montecarlo,
    /// Write simulated homodyne data and its reconstruction.
    TomoSim,
}

fn resolve(cli: &Cli) -> CliResult<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(g) = &cli.gamma {
        cfg.gamma = Some(g.clone());
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.monte_carlo.seed = s;
    }
    if let Some(n) = cli.samples {
        cfg.monte_carlo.n_samples = n;
    }
    if let Some(r) = cli.runs {
        cfg.monte_carlo.n_runs = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = resolve(cli)?;
    match cli.command {
        Command::Protocol => commands::protocol(&cfg),
        Command::Fig3 => commands::fig3(&cfg),
        Command::Fig4 => commands::fig4(&cfg),
        Command::Figs2 => commands::figs2(&cfg),
        Command::Montecarlo => commands::montecarlo(&cfg),
        Command::TomoSim => commands::tomo_sim(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
