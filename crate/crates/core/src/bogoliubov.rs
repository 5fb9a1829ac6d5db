// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Bogoliubov phonons of a homogeneous condensate, their coupling to lattice
//! impurities, and momentum grids for the mode sums.
//!
//! All quantities are in reduced units (see [`crate::params`]). Coupling
//! weights are volume free: a finite grid multiplies them by `1/Ω`, the
//! thermodynamic grid by the measure `dᴰq/(2π)ᴰ`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{thermal_factor, Reduced};

/// Dispersion and coupling weights for one condensate and one coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phonons {
    pub dim: usize,
    pub boson_mass: f64,
    pub gn0: f64,
    pub density: f64,
    pub kappa: f64,
    pub x0: f64,
    pub kt: f64,
}

impl Phonons {
    /// Phonons coupled with the model's `kappa`.
    pub fn new(model: &Reduced) -> Self {
        Self::with_kappa(model, model.kappa)
    }

    pub fn with_kappa(model: &Reduced, kappa: f64) -> Self {
        Phonons {
            dim: model.dim,
            boson_mass: model.boson_mass,
            gn0: model.gn0(),
            density: model.density,
            kappa,
            x0: model.x0,
            kt: model.kt,
        }
    }

    pub fn healing_length(&self) -> f64 {
        1.0 / (2.0 * self.boson_mass * self.gn0).sqrt()
    }

    pub fn sound_speed(&self) -> f64 {
        (self.gn0 / self.boson_mass).sqrt()
    }

    pub fn free_energy(&self, q: f64) -> f64 {
        q * q / (2.0 * self.boson_mass)
    }

    /// ħω_q without the zero-mode check.
    pub fn energy(&self, q: f64) -> f64 {
        let e = self.free_energy(q);
        (e * (e + 2.0 * self.gn0)).sqrt()
    }

    /// (ε_q, ħω_q) for |q| > 0.
    pub fn dispersion(&self, q: f64) -> Result<(f64, f64)> {
        if !(q.abs() > 0.0) || !q.is_finite() {
            return Err(Error::Domain(format!("dispersion needs |q| > 0, got {q}")));
        }
        Ok((self.free_energy(q), self.energy(q)))
    }

    /// dω/dq.
    pub fn group_velocity(&self, q: f64) -> f64 {
        if q == 0.0 {
            return self.sound_speed();
        }
        let e = self.free_energy(q);
        (e + self.gn0) / self.energy(q) * q / self.boson_mass
    }

    fn gaussian(&self, q: f64) -> f64 {
        (-0.5 * q * q * self.x0 * self.x0).exp()
    }

    /// d_q = κ² n0 (ε_q/ħω_q) e^{-q²x0²/2}.
    pub fn coupling_weight(&self, q: f64) -> Result<f64> {
        let (e, w) = self.dispersion(q)?;
        Ok(self.kappa * self.kappa * self.density * e / w * self.gaussian(q))
    }

    /// d_q/ħω_q, written without the ε/ħω cancellation.
    pub fn potential_density(&self, q: f64) -> f64 {
        let e = self.free_energy(q);
        self.kappa * self.kappa * self.density * self.gaussian(q) / (e + 2.0 * self.gn0)
    }

    /// d_q (2N_q+1)/(ħω_q)².
    pub fn dephasing_density(&self, q: f64) -> f64 {
        let e = self.free_energy(q);
        let w = (e * (e + 2.0 * self.gn0)).sqrt();
        self.kappa * self.kappa * self.density * self.gaussian(q) * thermal_factor(w, self.kt)
            / (w * (e + 2.0 * self.gn0))
    }

    /// d_q (2N_q+1)/ω_q.
    pub fn dissipative_density(&self, q: f64) -> f64 {
        let e = self.free_energy(q);
        let w = (e * (e + 2.0 * self.gn0)).sqrt();
        self.kappa * self.kappa * self.density * self.gaussian(q) * thermal_factor(w, self.kt) * e
            / (w * w)
    }

    /// Coupling constant F_{j,q} = κ √(n0 ε_q/ħω_q) f_j(q) for a mode vector
    /// `q` and a site position `r`.
    pub fn coupling(&self, q: &[f64], r: &[f64], volume: f64) -> Result<Complex64> {
        let qn = norm(q);
        let (e, w) = self.dispersion(qn)?;
        Ok(self.kappa * (self.density * e / w).sqrt() * form_factor(q, r, self.x0, volume))
    }
}

fn norm(q: &[f64]) -> f64 {
    q.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Gaussian Wannier form factor Ω^{-1/2} exp(i q·r) exp(-Σ q_l² x0²/4).
pub fn form_factor(q: &[f64], r: &[f64], x0: f64, volume: f64) -> Complex64 {
    let phase: f64 = q.iter().zip(r).map(|(a, b)| a * b).sum();
    let decay: f64 = q.iter().map(|c| c * c * x0 * x0).sum::<f64>() / 4.0;
    Complex64::from_polar((-decay).exp() / volume.sqrt(), phase)
}

/// How the separation factor `cos(q·Δr)` enters a sum over the nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparationKernel {
    /// Explicit mode vectors: cos(q_x Δr).
    Plane,
    /// Radial nodes in two dimensions: J0(|q| Δr).
    Bessel,
    /// Radial nodes in three dimensions: sin(|q| Δr)/(|q| Δr).
    Sinc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridNode {
    /// |q|.
    pub q: f64,
    /// Component along the lattice axis.
    pub qx: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridKind {
    Finite { length: f64, n_max: usize },
    Thermodynamic { q_max: f64, panels: usize },
}

/// Quadrature settings for the thermodynamic limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Scale applied to the cutoff max(8/x0, 20/ξ).
    pub q_max_factor: f64,
    pub tolerance: f64,
    /// Largest time the grid must resolve.
    pub t_max: f64,
    /// Largest separation the grid must resolve.
    pub r_max: f64,
    /// Phase budget per panel in radians.
    pub panel_phase: f64,
    /// Gauss-Legendre order on each panel.
    pub order: usize,
    /// Order of the embedded error estimate.
    pub coarse_order: usize,
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            q_max_factor: 1.0,
            tolerance: 1e-8,
            t_max: 0.0,
            r_max: 0.0,
            panel_phase: 8.0,
            order: 16,
            coarse_order: 12,
            max_refinements: 6,
        }
    }
}

impl QuadratureSpec {
    pub fn resolving(t_max: f64, r_max: f64) -> Self {
        QuadratureSpec {
            t_max,
            r_max,
            ..Self::default()
        }
    }
}

/// Value of a mode sum with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub residual: f64,
    /// Sum of |integrand|, the scale for relative tolerances.
    pub magnitude: f64,
}

impl Estimate {
    pub fn exact(value: f64, magnitude: f64) -> Self {
        Estimate {
            value,
            residual: 0.0,
            magnitude,
        }
    }

    pub fn check(self, tolerance: f64) -> Result<f64> {
        if self.residual <= tolerance * self.magnitude {
            Ok(self.value)
        } else {
            Err(Error::Accuracy {
                value: self.value,
                residual: self.residual,
                tolerance,
            })
        }
    }
}

/// Discrete mode set or radial quadrature over quasi-momentum space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub dim: usize,
    pub kind: GridKind,
    pub separation: SeparationKernel,
    pub nodes: Vec<GridNode>,
    /// Lower-order rule on the same panels, empty for finite grids.
    pub coarse: Vec<GridNode>,
    pub tolerance: f64,
    /// Ω for finite grids.
    pub volume: Option<f64>,
    pub zero_mode_excluded: bool,
}

fn radial_measure(dim: usize, q: f64) -> f64 {
    match dim {
        1 => 1.0 / PI,
        2 => q / (2.0 * PI),
        _ => q * q / (2.0 * PI * PI),
    }
}

fn gl_rule(order: usize) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(order).ok_or_else(|| Error::invalid("grid.order", "must be > 0"))?;
    Ok(GaussLegendre::new(n).as_node_weight_pairs().to_vec())
}

impl MomentumGrid {
    /// Modes q = 2πn/L per axis with n ∈ [-n_max, n_max]ᴰ, excluding q = 0.
    pub fn finite(dim: usize, length: f64, n_max: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(length > 0.0) || n_max == 0 {
            return Err(Error::Configuration(format!(
                "finite grid needs L > 0 and n_max > 0, got L = {length}, n_max = {n_max}"
            )));
        }
        let volume = length.powi(dim as i32);
        let w = 1.0 / volume;
        let dq = 2.0 * PI / length;
        let n = n_max as i64;
        let mut nodes = Vec::new();
        let range = || -n..=n;
        let ys: Vec<i64> = if dim >= 2 { range().collect() } else { vec![0] };
        let zs: Vec<i64> = if dim == 3 { range().collect() } else { vec![0] };
        for nx in range() {
            for &ny in &ys {
                for &nz in &zs {
                    if nx == 0 && ny == 0 && nz == 0 {
                        continue;
                    }
                    let (qx, qy, qz) = (nx as f64 * dq, ny as f64 * dq, nz as f64 * dq);
                    nodes.push(GridNode {
                        q: (qx * qx + qy * qy + qz * qz).sqrt(),
                        qx,
                        weight: w,
                    });
                }
            }
        }
        Ok(MomentumGrid {
            dim,
            kind: GridKind::Finite { length, n_max },
            separation: SeparationKernel::Plane,
            nodes,
            coarse: Vec::new(),
            tolerance: 0.0,
            volume: Some(volume),
            zero_mode_excluded: true,
        })
    }

    /// Radial Gauss-Legendre panels on (0, q_max] with the angular integral
    /// done analytically.
    pub fn thermodynamic(model: &Reduced, spec: &QuadratureSpec) -> Result<Self> {
        Self::thermodynamic_refined(model, spec, 0)
    }

    fn thermodynamic_refined(model: &Reduced, spec: &QuadratureSpec, level: u32) -> Result<Self> {
        let dim = model.dim;
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let ph = Phonons::new(model);
        let xi = ph.healing_length();
        let q_max = spec.q_max_factor * (8.0 / model.x0).max(20.0 / xi);
        if !(q_max * model.x0 >= 4.0) {
            return Err(Error::Configuration(format!(
                "q_max x0 = {} < 4 does not resolve the Gaussian form factor",
                q_max * model.x0
            )));
        }
        if !(spec.panel_phase > 0.0) || spec.tolerance <= 0.0 {
            return Err(Error::Configuration("grid.panel_phase and grid.tolerance must be > 0".into()));
        }
        let scale = 0.5f64.powi(level as i32);
        let h_base = 0.5 * (1.0 / xi).min(1.0 / model.x0) * scale;
        let phase_rate = |q: f64| spec.t_max * ph.group_velocity(q) + spec.r_max;
        let mut edges = vec![0.0];
        let mut q = 0.0;
        while q < q_max {
            let h0 = (spec.panel_phase * scale / phase_rate(q).max(1e-300)).min(h_base);
            let h = (spec.panel_phase * scale / phase_rate(q + h0).max(1e-300)).min(h_base);
            q = (q + h).min(q_max);
            edges.push(q);
        }
        let fine_rule = gl_rule(spec.order)?;
        let coarse_rule = gl_rule(spec.coarse_order)?;
        let expand = |rule: &[(f64, f64)]| {
            let mut out = Vec::with_capacity(rule.len() * (edges.len() - 1));
            for pair in edges.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                for &(x, w) in rule {
                    let q = mid + half * x;
                    out.push(GridNode {
                        q,
                        qx: q,
                        weight: w * half * radial_measure(dim, q),
                    });
                }
            }
            out
        };
        let separation = match dim {
            1 => SeparationKernel::Plane,
            2 => SeparationKernel::Bessel,
            _ => SeparationKernel::Sinc,
        };
        Ok(MomentumGrid {
            dim,
            kind: GridKind::Thermodynamic {
                q_max,
                panels: edges.len() - 1,
            },
            separation,
            nodes: expand(&fine_rule),
            coarse: expand(&coarse_rule),
            tolerance: spec.tolerance,
            volume: None,
            zero_mode_excluded: true,
        })
    }

    /// Doubles the panel count until `probe` converges to the tolerance.
    pub fn adaptive<F>(model: &Reduced, spec: &QuadratureSpec, probe: F) -> Result<Self>
    where
        F: Fn(&MomentumGrid) -> Estimate,
    {
        let mut last = None;
        for level in 0..=spec.max_refinements {
            let grid = Self::thermodynamic_refined(model, spec, level)?;
            let est = probe(&grid);
            if est.check(spec.tolerance).is_ok() {
                return Ok(grid);
            }
            last = Some(est);
        }
        let est = last.expect("at least one level");
        Err(Error::Accuracy {
            value: est.value,
            residual: est.residual,
            tolerance: spec.tolerance,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn q_max(&self) -> f64 {
        self.nodes.iter().map(|n| n.q).fold(0.0, f64::max)
    }

    /// Angular-averaged separation factor for a node at distance `r` along
    /// the lattice axis.
    pub fn separation_factor(&self, node: &GridNode, r: f64) -> f64 {
        match self.separation {
            SeparationKernel::Plane => (node.qx * r).cos(),
            SeparationKernel::Bessel => puruspe::bessel::Jn(0, node.q * r),
            SeparationKernel::Sinc => {
                let x = node.q * r;
                if x.abs() < 1e-4 {
                    1.0 - x * x / 6.0
                } else {
                    x.sin() / x
                }
            }
        }
    }

    /// Σ w f(node) with an embedded error estimate.
    pub fn integrate<F>(&self, f: F) -> Estimate
    where
        F: Fn(&GridNode) -> f64,
    {
        let (value, magnitude) = sum_nodes(&self.nodes, &f);
        if self.coarse.is_empty() {
            return Estimate::exact(value, magnitude);
        }
        let (coarse, _) = sum_nodes(&self.coarse, &f);
        Estimate {
            value,
            residual: (value - coarse).abs(),
            magnitude,
        }
    }

    /// Like [`integrate`](Self::integrate) but fails when the residual
    /// exceeds the grid tolerance.
    pub fn sum<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&GridNode) -> f64,
    {
        self.integrate(f).check(self.tolerance.max(f64::EPSILON))
    }

    /// Σ w f(|q|) exp(i q·Δr) assembled from explicit phases, without using
    /// the q → -q symmetry. Its imaginary part measures the asymmetry of the
    /// grid.
    pub fn assemble_complex<F>(&self, f: F, r: f64) -> Complex64
    where
        F: Fn(f64) -> f64,
    {
        let angular = match self.separation {
            SeparationKernel::Plane => Vec::new(),
            _ => gl_rule(48).expect("fixed order"),
        };
        let mut acc = Complex64::new(0.0, 0.0);
        let thermodynamic = matches!(self.kind, GridKind::Thermodynamic { .. });
        for node in &self.nodes {
            let a = node.weight * f(node.q);
            let s = match self.separation {
                SeparationKernel::Plane if thermodynamic => {
                    let p = node.qx * r;
                    0.5 * (Complex64::cis(p) + Complex64::cis(-p))
                }
                SeparationKernel::Plane => Complex64::cis(node.qx * r),
                SeparationKernel::Bessel => angular
                    .iter()
                    .map(|&(x, w)| 0.5 * w * Complex64::cis(node.q * r * (0.5 * PI * (x + 1.0)).cos()))
                    .sum(),
                SeparationKernel::Sinc => angular
                    .iter()
                    .map(|&(u, w)| 0.5 * w * Complex64::cis(node.q * r * u))
                    .sum(),
            };
            acc += a * s;
        }
        acc
    }
}

fn sum_nodes<F>(nodes: &[GridNode], f: &F) -> (f64, f64)
where
    F: Fn(&GridNode) -> f64,
{
    // Pairwise blocks keep the rounding independent of the node count.
    const BLOCK: usize = 256;
    let partial: Vec<(f64, f64)> = nodes
        .chunks(BLOCK)
        .map(|chunk| {
            chunk.iter().fold((0.0, 0.0), |(s, m), n| {
                let v = n.weight * f(n);
                (s + v, m + v.abs())
            })
        })
        .collect();
    pairwise(&partial)
}

fn pairwise(parts: &[(f64, f64)]) -> (f64, f64) {
    match parts.len() {
        0 => (0.0, 0.0),
        1 => parts[0],
        n => {
            let (a, b) = parts.split_at(n / 2);
            let (x, y) = (pairwise(a), pairwise(b));
            (x.0 + y.0, x.1 + y.1)
        }
    }
}
