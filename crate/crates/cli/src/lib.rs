//! Experiment runner: config parsing, subcommand drivers, CSV and manifest
//! output for the `trofdm` binary.

pub mod commands;
pub mod config;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

pub use commands::{Command, Exclusions, Outcome};
pub use config::{ConfigError, RunConfig};
pub use table::{Cell, Table};

/// Run record written next to each CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub version: &'static str,
    pub master_seed: u64,
    pub config: RunConfig,
    pub threads: usize,
    pub wall_time_s: f64,
    pub csv: String,
    pub rows: usize,
    pub exclusions: Exclusions,
    pub passed: bool,
}

pub struct RunArtifacts {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub manifest: RunManifest,
}

/// Runs `cmd` and writes `<name>.csv` and `<name>.manifest.json` into `out`.
pub fn run_subcommand(cmd: Command, cfg: &RunConfig, out: &Path) -> anyhow::Result<RunArtifacts> {
    let start = Instant::now();
    let outcome = commands::run(cmd, cfg)?;
    let wall_time_s = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;
    let csv_name = format!("{}.csv", cmd.name());
    let csv_path = out.join(&csv_name);
    outcome
        .table
        .save(&csv_path)
        .with_context(|| format!("writing {}", csv_path.display()))?;

    let manifest = RunManifest {
        subcommand: cmd.name(),
        version: env!("CARGO_PKG_VERSION"),
        master_seed: cfg.seed,
        config: cfg.clone(),
        threads: trofdm::exec::num_threads(),
        wall_time_s,
        csv: csv_name,
        rows: outcome.table.len(),
        exclusions: outcome.exclusions,
        passed: outcome.passed,
    };
    let manifest_path = out.join(format!("{}.manifest.json", cmd.name()));
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(&manifest_path, json)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(RunArtifacts {
        csv_path,
        manifest_path,
        manifest,
    })
}
