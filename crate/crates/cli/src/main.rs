use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use trofdm_cli::{run_subcommand, Command, RunConfig};

/// Monte Carlo and analytic experiments for time-reversal OFDM with
/// artificial noise.
#[derive(Debug, Parser)]
#[command(name = "trofdm", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Flat TOML config; every key is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        anyhow::ensure!(n > 0, "--threads must be positive");
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("building thread pool")?;
    let art = pool.install(|| run_subcommand(cli.command, &cfg, &cli.out))?;
    eprintln!(
        "{}: {} rows -> {} ({:.1} s)",
        art.manifest.subcommand,
        art.manifest.rows,
        art.csv_path.display(),
        art.manifest.wall_time_s
    );
    if !art.manifest.passed {
        eprintln!(
            "{}: one or more checks failed, see {}",
            art.manifest.subcommand,
            art.csv_path.display()
        );
    }
    Ok(art.manifest.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
