// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Phonon-mediated impurity-impurity potential, polaron energy and the
//! transient two-body phase.
//!
//! The stored potential `V(Δ)` is the positive magnitude; the lattice
//! Hamiltonian carries it with a minus sign, `H = -Σ V_{ij} n_i n_j`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::bogoliubov::{MomentumGrid, Phonons, QuadratureSpec};
use crate::error::{Error, Result};
use crate::params::Reduced;

/// Default number of tabulated separations.
pub const DEFAULT_DELTA_MAX: usize = 20;

/// V(Δ) in E_R for separations Δ·a along the lattice axis.
pub fn mediated_potential(model: &Reduced, grid: &MomentumGrid, delta: i64) -> Result<f64> {
    let ph = Phonons::new(model);
    let r = delta.unsigned_abs() as f64 * model.spacing;
    grid.sum(|n| ph.potential_density(n.q) * grid.separation_factor(n, r))
}

/// E_p = Σ' d_q/ħω_q, identical to the on-site potential.
pub fn polaron_energy(model: &Reduced, grid: &MomentumGrid) -> Result<f64> {
    mediated_potential(model, grid, 0)
}

/// Yukawa form of the three-dimensional potential for point-like
/// impurities, κ² e^{-√2 r/ξ}/(4π g ξ² r).
pub fn mediated_potential_3d_closed(model: &Reduced, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("closed form diverges at r = {r}")));
    }
    let xi = model.healing_length();
    Ok(model.kappa * model.kappa * (-SQRT_2 * r / xi).exp() / (4.0 * PI * model.g * xi * xi * r))
}

/// ωt − sin ωt without cancellation at small ωt.
pub(crate) fn omega_t_minus_sin(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x3 = x * x * x;
        x3 / 6.0 - x3 * x * x / 120.0 + x3 * x3 * x / 5040.0
    } else {
        x - x.sin()
    }
}

/// Accumulated two-body phase φ(Δ, t) = Σ' d_q cos(qΔr)(ω_q t − sin ω_q t)/ω_q².
/// Tends to V(Δ)·t for t ≫ ξ/c.
pub fn transient_phase(model: &Reduced, grid: &MomentumGrid, delta: i64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("negative time {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let ph = Phonons::new(model);
    let r = delta.unsigned_abs() as f64 * model.spacing;
    grid.sum(|n| {
        let w = ph.energy(n.q);
        ph.potential_density(n.q) / w * omega_t_minus_sin(w * t) * grid.separation_factor(n, r)
    })
}

/// Tabulated potential with exponential extrapolation past `delta_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialTable {
    pub dim: usize,
    /// V(0), V(1), …, V(delta_max) in E_R.
    pub values: Vec<f64>,
    /// Decay rate per site fitted to the last two entries.
    pub tail_rate: f64,
    pub grid_nodes: usize,
}

impl PotentialTable {
    pub fn build(model: &Reduced, grid: &MomentumGrid, delta_max: usize) -> Result<Self> {
        let values = (0..=delta_max as i64)
            .map(|d| mediated_potential(model, grid, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_values(model.dim, values, grid.len()))
    }

    /// Builds a table on a grid that resolves separations up to `delta_max`.
    pub fn compute(model: &Reduced, delta_max: usize) -> Result<Self> {
        let spec = QuadratureSpec::resolving(0.0, delta_max as f64 * model.spacing);
        let grid = MomentumGrid::thermodynamic(model, &spec)?;
        Self::build(model, &grid, delta_max)
    }

    pub fn from_values(dim: usize, values: Vec<f64>, grid_nodes: usize) -> Self {
        let n = values.len();
        let tail_rate = if n >= 3 && values[n - 1] > 0.0 && values[n - 2] > values[n - 1] {
            (values[n - 2] / values[n - 1]).ln()
        } else {
            f64::INFINITY
        };
        PotentialTable {
            dim,
            values,
            tail_rate,
            grid_nodes,
        }
    }

    pub fn delta_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn onsite(&self) -> f64 {
        self.values[0]
    }

    pub fn nearest_neighbour(&self) -> f64 {
        self.values[1]
    }

    pub fn get(&self, delta: i64) -> f64 {
        let d = delta.unsigned_abs() as usize;
        if d <= self.delta_max() {
            self.values[d]
        } else if self.tail_rate.is_finite() {
            self.values[self.delta_max()] * (-self.tail_rate * (d - self.delta_max()) as f64).exp()
        } else {
            0.0
        }
    }

    /// V at a lattice displacement (dx, dy), |Δ| = √(dx² + dy²) sites,
    /// interpolated in |Δ| when the displacement is off axis.
    pub fn at_displacement(&self, dx: i64, dy: i64) -> f64 {
        if dy == 0 {
            return self.get(dx);
        }
        if dx == 0 {
            return self.get(dy);
        }
        let r = ((dx * dx + dy * dy) as f64).sqrt();
        let lo = r.floor() as i64;
        let frac = r - lo as f64;
        let (a, b) = (self.get(lo), self.get(lo + 1));
        if a > 0.0 && b > 0.0 {
            a * (b / a).powf(frac)
        } else {
            a + (b - a) * frac
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;

    fn table_grid(m: &Reduced) -> MomentumGrid {
        MomentumGrid::thermodynamic(m, &QuadratureSpec::resolving(0.0, 10.0)).unwrap()
    }

    #[test]
    fn zero_coupling_gives_zero_potential() {
        let m = presets::fig3_cluster_1d().reduced().unwrap().with_kappa(0.0);
        let g = table_grid(&m);
        for d in 0..5 {
            assert_eq!(mediated_potential(&m, &g, d).unwrap(), 0.0);
        }
        assert_eq!(polaron_energy(&m, &g).unwrap(), 0.0);
    }

    #[test]
    fn polaron_energy_is_onsite_potential_and_quadratic() {
        let m = presets::fig3_cluster_1d().reduced().unwrap();
        let g = table_grid(&m);
        let ep = polaron_energy(&m, &g).unwrap();
        assert_eq!(ep.to_bits(), mediated_potential(&m, &g, 0).unwrap().to_bits());
        let m2 = m.with_kappa(2.0 * m.kappa);
        assert_relative_eq!(polaron_energy(&m2, &g).unwrap(), 4.0 * ep, max_relative = 1e-13);
    }

    #[test]
    fn one_dimensional_onsite_energy() {
        let m = presets::fig3_cluster_1d().reduced().unwrap();
        let v = polaron_energy(&m, &table_grid(&m)).unwrap();
        assert!((v / 0.03 - 1.0).abs() < 0.1, "V11 = {v}");
    }

    #[test]
    fn potential_decreases_with_distance() {
        for p in [presets::fig3_cluster_1d(), presets::fig5_cluster_2d()] {
            let m = p.reduced().unwrap();
            let t = PotentialTable::compute(&m, 12).unwrap();
            for w in t.values.windows(2) {
                assert!(w[0] > w[1], "{:?}", t.values);
            }
            assert!(t.get(30) < t.get(12));
            assert_eq!(t.get(-3), t.get(3));
        }
    }

    #[test]
    fn yukawa_closed_form_identities() {
        let m = presets::nacs_gate_3d().reduced().unwrap();
        let xi = m.healing_length();
        for &r in &[0.3, 1.0, 2.2] {
            let ratio = mediated_potential_3d_closed(&m, r).unwrap()
                / mediated_potential_3d_closed(&m, 2.0 * r).unwrap();
            assert_relative_eq!(ratio, 2.0 * (SQRT_2 * r / xi).exp(), max_relative = 1e-12);
        }
        assert!(mediated_potential_3d_closed(&m, 0.0).is_err());
        let far = mediated_potential_3d_closed(&m, 200.0).unwrap();
        assert!(far < 1e-30);
    }

    #[test]
    fn three_dimensional_quadrature_matches_yukawa() {
        let mut m = presets::nacs_gate_3d().reduced().unwrap();
        m.x0 = 0.05 * m.healing_length();
        let g = MomentumGrid::thermodynamic(&m, &QuadratureSpec::resolving(0.0, 3.0)).unwrap();
        for d in 1..=6 {
            let v = mediated_potential(&m, &g, d).unwrap();
            let c = mediated_potential_3d_closed(&m, d as f64 * 0.5).unwrap();
            assert!((v / c - 1.0).abs() < 0.02, "Δ = {d}: {v} vs {c}");
        }
    }

    #[test]
    fn transient_phase_limits() {
        let m = presets::fig3_cluster_1d().reduced().unwrap();
        let t_big = 16000.0;
        let g = MomentumGrid::thermodynamic(&m, &QuadratureSpec::resolving(t_big, 1.0)).unwrap();
        assert_eq!(transient_phase(&m, &g, 1, 0.0).unwrap(), 0.0);
        let v1 = mediated_potential(&m, &g, 1).unwrap();
        let phi = transient_phase(&m, &g, 1, t_big).unwrap();
        assert!((phi / (v1 * t_big) - 1.0).abs() < 0.01, "{phi} vs {}", v1 * t_big);
    }

    #[test]
    fn transient_phase_is_cubic_at_short_times() {
        let m = presets::fig3_cluster_1d().reduced().unwrap();
        let g = MomentumGrid::thermodynamic(&m, &QuadratureSpec::resolving(1e-3, 0.0)).unwrap();
        let (t1, t2) = (1e-4, 2e-4);
        let p1 = transient_phase(&m, &g, 0, t1).unwrap();
        let p2 = transient_phase(&m, &g, 0, t2).unwrap();
        let slope = (p2 / p1).ln() / (t2 / t1).ln();
        assert!((slope - 3.0).abs() < 0.1, "slope {slope}");
    }
}
