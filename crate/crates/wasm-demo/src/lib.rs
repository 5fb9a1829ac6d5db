// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Browser bindings for three small demos: dephasing curves, the induced
//! potential and a live Metropolis lattice gas.

use bec_lattice::bogoliubov::{MomentumGrid, QuadratureSpec};
use bec_lattice::clustering::{
    self, Couplings, Geometry, LatticeConfiguration, McRun, PairCounting, PotentialMode,
};
use bec_lattice::dephasing::{self, TimeMode};
use bec_lattice::interaction::PotentialTable;
use bec_lattice::qubitgate;
use bec_lattice::{Preset, SystemParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn preset(name: &str) -> Result<Preset, JsError> {
    Preset::from_name(name).ok_or_else(|| JsError::new(&format!("unknown preset `{name}`")))
}

/// Rows of (t_ms, Γ₀, Γ₋, Γ₊, ⟨F⟩) for the fig2 system, flattened.
#[wasm_bindgen]
pub fn dephasing_curves(
    separation_sites: f64,
    t_max_ms: f64,
    points: usize,
    temperature_nk: f64,
) -> Result<Vec<f64>, JsError> {
    let p = Preset::Fig2Dephasing.params();
    let u = p.units();
    let m = p
        .reduced()
        .map_err(js_err)?
        .with_kt(u.temperature_from_nk(temperature_nk.max(0.0)));
    let r = separation_sites * m.spacing;
    let t_max = u.time_from_ms(t_max_ms);
    let grid = MomentumGrid::thermodynamic(&m, &QuadratureSpec::resolving(t_max, r)).map_err(js_err)?;
    let mut out = Vec::with_capacity(points * 5);
    for i in 0..points {
        let f = if points > 1 { i as f64 / (points - 1) as f64 } else { 0.0 };
        let t = f * t_max;
        let g = dephasing::gamma_triple(&m, &grid, r, TimeMode::At(t)).map_err(js_err)?.triple;
        out.extend([
            u.time_to_ms(t),
            g.gamma0,
            g.gamma_minus,
            g.gamma_plus,
            qubitgate::average_fidelity(&g),
        ]);
    }
    Ok(out)
}

/// V(Δ) in E_R for Δ = 0..=delta_max with the coupling scaled by `kappa_scale`.
#[wasm_bindgen]
pub fn potential_profile(preset_name: &str, delta_max: usize, kappa_scale: f64) -> Result<Vec<f64>, JsError> {
    let p = preset(preset_name)?.params();
    let m = p.reduced().map_err(js_err)?;
    let m = m.with_kappa(m.kappa * kappa_scale);
    let t = PotentialTable::compute(&m, delta_max.clamp(1, 40)).map_err(js_err)?;
    Ok(t.values)
}

/// Nearest-neighbour lattice gas on a ring (fig3) or torus (fig5).
#[wasm_bindgen]
pub struct ClusterSim {
    params: SystemParams,
    geometry: Geometry,
    couplings: Couplings,
    config: LatticeConfiguration,
    kt: f64,
    seed: u64,
    calls: u64,
    v12: f64,
}

#[wasm_bindgen]
impl ClusterSim {
    #[wasm_bindgen(constructor)]
    pub fn new(preset_name: &str, size: usize, filling: f64, temperature_nk: f64, seed: u64) -> Result<ClusterSim, JsError> {
        let params = preset(preset_name)?.params();
        let m = params.reduced().map_err(js_err)?;
        let geometry = match m.dim {
            1 => Geometry::Ring(size.max(4)),
            2 => Geometry::Torus(size.max(4)),
            d => return Err(JsError::new(&format!("no lattice gas in {d} dimensions"))),
        };
        let v12 = PotentialTable::compute(&m, 1).map_err(js_err)?.nearest_neighbour();
        let couplings = Couplings::new(
            geometry,
            &PotentialMode::NearestNeighbour(v12),
            PairCounting::default_for(geometry),
            m.onsite_u,
        )
        .map_err(js_err)?;
        let atoms = ((filling.clamp(0.0, 1.0) * geometry.sites() as f64).round() as usize).clamp(1, geometry.sites() - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let config = LatticeConfiguration::random(geometry, atoms, &mut rng).map_err(js_err)?;
        let mut sim = ClusterSim {
            params,
            geometry,
            couplings,
            config,
            kt: 0.0,
            seed,
            calls: 0,
            v12,
        };
        sim.set_temperature(temperature_nk);
        Ok(sim)
    }

    pub fn set_temperature(&mut self, temperature_nk: f64) {
        self.kt = self.params.units().temperature_from_nk(temperature_nk.max(1e-3));
    }

    /// Runs `moves` proposed single-atom moves.
    pub fn step(&mut self, moves: u32) -> Result<(), JsError> {
        if moves == 0 {
            return Ok(());
        }
        self.calls += 1;
        let run = McRun::new(self.seed.wrapping_add(self.calls), self.kt, 0, moves as u64, moves as u64);
        let (_, cfg) = clustering::metropolis_run_with(self.config.clone(), &self.couplings, &run, |_| {})
            .map_err(js_err)?;
        self.config = cfg;
        Ok(())
    }

    pub fn occupation(&self) -> Vec<u8> {
        self.config.occupation().iter().map(|&o| o as u8).collect()
    }

    pub fn side(&self) -> usize {
        match self.geometry {
            Geometry::Ring(m) => m,
            Geometry::Torus(l) => l,
        }
    }

    pub fn dimension(&self) -> usize {
        self.geometry.dim()
    }

    pub fn atoms(&self) -> usize {
        self.config.atoms()
    }

    pub fn clusters(&self) -> usize {
        clustering::count_clusters(&self.config)
    }

    pub fn largest(&self) -> usize {
        clustering::largest_cluster(&self.config)
    }

    pub fn energy_er(&self) -> f64 {
        clustering::energy(&self.config, &self.couplings)
    }

    pub fn v12_nk(&self) -> f64 {
        self.params.units().energy_to_nk(self.v12)
    }
}
