// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use bec_lattice::params::{RegimeWarning, SystemParams};
use bec_lattice::Reduced;
use serde::{Deserialize, Serialize};

/// Record of one run. Everything except `wall_time_s` is a function of the
/// config and the seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub code_version: String,
    pub preset: String,
    pub config: BTreeMap<String, String>,
    pub params: SystemParams,
    pub reduced: Reduced,
    pub grid: serde_json::Value,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
    pub regime_warnings: Vec<RegimeWarning>,
    pub notes: Vec<String>,
    pub results: serde_json::Value,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
