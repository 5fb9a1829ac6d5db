// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line driver for the bec-lattice simulations.

pub mod commands;
pub mod manifest;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context as _, Result};
use bec_lattice::config::Config;
use bec_lattice::params::validate_regime;
use clap::{Args, Parser, Subcommand};

pub use commands::Command;
pub use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "bec-lattice", version, about = "Impurities in an optical lattice immersed in a BEC")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: SubCmd,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (0: all cores).
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub threads: usize,
    /// Set a config key, e.g. `--override bec.temperature_nK=5`.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum SubCmd {
    /// Induced potential V(Δ) on the lattice.
    Potential,
    /// Dephasing factors against time, distance or temperature.
    DephasingScan,
    /// Two-qubit phase gate time and average fidelity.
    GateFidelity,
    /// Metropolis cluster statistics over a temperature grid.
    ClusterMc,
    /// Single-particle transport under the master equation.
    Transport,
    /// Bloch oscillations in a tilted lattice.
    Bloch,
}

impl From<SubCmd> for Command {
    fn from(s: SubCmd) -> Self {
        match s {
            SubCmd::Potential => Command::Potential,
            SubCmd::DephasingScan => Command::DephasingScan,
            SubCmd::GateFidelity => Command::GateFidelity,
            SubCmd::ClusterMc => Command::ClusterMc,
            SubCmd::Transport => Command::Transport,
            SubCmd::Bloch => Command::Bloch,
        }
    }
}

/// Loads the config file and applies overrides in order.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    for o in overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

/// Runs one subcommand, writes its outputs and manifest into `out`.
pub fn run(cmd: Command, config: &Config, out: &Path, seed: u64) -> Result<RunManifest> {
    let start = Instant::now();
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let ctx = commands::Context { config, out, seed };
    let outcome = commands::execute(cmd, &ctx)?;
    let reduced = outcome.params.reduced()?;
    let preset = config.preset(cmd.default_preset())?;
    let manifest = RunManifest {
        subcommand: cmd.name().to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        preset: preset.name().to_string(),
        config: config
            .entries()
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        params: outcome.params,
        reduced,
        grid: outcome.grid,
        seed,
        seeds: outcome.seeds,
        outputs: outcome
            .outputs
            .iter()
            .map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default())
            .collect(),
        regime_warnings: validate_regime(&reduced)?,
        notes: outcome.notes,
        results: outcome.results,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    manifest.write(out)?;
    Ok(manifest)
}
