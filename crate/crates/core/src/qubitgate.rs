// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Two-qubit dephasing channel, its Kraus form, and the controlled-phase gate
//! built from the mediated interaction.
//!
//! Basis order is |00⟩, |01⟩, |10⟩, |11⟩; the element ρ_{ijkl} sits at row
//! `2i + j`, column `2k + l`.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bogoliubov::{MomentumGrid, QuadratureSpec};
use crate::dephasing::GammaTriple;
use crate::error::{Error, Result};
use crate::interaction::{mediated_potential, transient_phase};
use crate::params::Reduced;

pub type Mat4 = Matrix4<Complex64>;

const C1: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Mat4,
}

impl TwoQubitState {
    pub fn new(rho: Mat4) -> Result<Self> {
        let s = TwoQubitState { rho };
        s.validate()?;
        Ok(s)
    }

    pub fn pure(psi: &Vector4<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::State("zero state vector".into()));
        }
        let v = psi / Complex64::from(norm);
        Self::new(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    pub fn validate(&self) -> Result<()> {
        let herm = max_norm(&(self.rho - self.rho.adjoint()));
        if herm > 1e-12 {
            return Err(Error::State(format!("not Hermitian, deviation {herm:e}")));
        }
        let tr = self.rho.trace();
        if (tr - C1).norm() > 1e-12 {
            return Err(Error::State(format!("trace {tr} differs from 1")));
        }
        let min = self
            .rho
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::State(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// Factor multiplying ρ_{ab} under the dephasing channel.
pub fn element_factor(a: usize, b: usize, g: &GammaTriple) -> f64 {
    let (i, j, k, l) = (a >> 1, a & 1, b >> 1, b & 1);
    if a == b {
        1.0
    } else if (i + j + k + l) % 2 == 1 {
        g.gamma0
    } else if (a, b) == (1, 2) || (a, b) == (2, 1) {
        g.gamma_minus
    } else {
        debug_assert!((a, b) == (0, 3) || (a, b) == (3, 0));
        g.gamma_plus
    }
}

/// Element-wise dephasing map.
pub fn apply_dephasing(state: &TwoQubitState, g: &GammaTriple) -> Result<TwoQubitState> {
    state.validate()?;
    Ok(TwoQubitState {
        rho: dephase_matrix(&state.rho, g),
    })
}

fn dephase_matrix(rho: &Mat4, g: &GammaTriple) -> Mat4 {
    Mat4::from_fn(|a, b| rho[(a, b)] * element_factor(a, b, g))
}

/// Six diagonal Kraus operators with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub operators: [Mat4; 6],
    pub weights: [f64; 6],
}

fn diag(d: [f64; 4]) -> Mat4 {
    Mat4::from_diagonal(&Vector4::new(d[0].into(), d[1].into(), d[2].into(), d[3].into()))
}

const SIGNS: [[f64; 4]; 6] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [-1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, 1.0, -1.0],
];

/// Kraus operators √w₁·1, √w₂·σz⊗σz, √w₃·σz⊗1, √w₄·1⊗σz,
/// √w₅·diag(−1,1,1,1), √w₆·diag(1,1,1,−1).
pub fn kraus_set(g: &GammaTriple) -> Result<KrausSet> {
    let w2 = (1.0 - 2.0 * g.gamma0 + g.gamma_plus) / 4.0;
    if w2 < 0.0 {
        return Err(Error::DecompositionUnavailable {
            which: "1 - 2*gamma0 + gamma_plus",
            value: 4.0 * w2,
        });
    }
    let w5 = (g.gamma_minus - g.gamma_plus) / 4.0;
    if w5 < 0.0 {
        return Err(Error::DecompositionUnavailable {
            which: "gamma_minus - gamma_plus",
            value: 4.0 * w5,
        });
    }
    let w3 = (1.0 - g.gamma_minus) / 4.0;
    let w1 = (1.0 + 2.0 * g.gamma0 + g.gamma_plus) / 4.0;
    let weights = [w1, w2, w3, w3, w5, w5];
    let operators = std::array::from_fn(|k| diag(SIGNS[k]) * Complex64::from(weights[k].sqrt()));
    Ok(KrausSet { operators, weights })
}

impl KrausSet {
    pub fn apply(&self, rho: &Mat4) -> Mat4 {
        self.operators
            .iter()
            .fold(Mat4::zeros(), |acc, e| acc + e * rho * e.adjoint())
    }

    /// Σ E†E − 1, which vanishes for a trace-preserving set.
    pub fn completeness_defect(&self) -> f64 {
        let s = self
            .operators
            .iter()
            .fold(Mat4::zeros(), |acc, e| acc + e.adjoint() * e);
        max_norm(&(s - Mat4::identity()))
    }
}

/// ⟨F⟩ = (4 + 4Γ₀ + Γ₋ + Γ₊)/10.
pub fn average_fidelity(g: &GammaTriple) -> f64 {
    (4.0 + 4.0 * g.gamma0 + g.gamma_minus + g.gamma_plus) / 10.0
}

/// ⟨F⟩ = (Σ|tr E|² + d)/(d(d+1)) with d = 4.
pub fn average_fidelity_from_kraus(k: &KrausSet) -> f64 {
    let s: f64 = k.operators.iter().map(|e| e.trace().norm_sqr()).sum();
    (s + 4.0) / 20.0
}

/// Fidelity for two qubits dephased by independent reservoirs, Γ₋ = Γ₊ = Γ₀².
pub fn independent_reservoir_fidelity(gamma0: f64) -> f64 {
    (2.0 + 2.0 * gamma0 + gamma0 * gamma0) / 5.0
}

/// True when a common reservoir does worse than independent ones,
/// Γ₊ + Γ₋ < 2Γ₀².
pub fn common_reservoir_is_worse(g: &GammaTriple) -> bool {
    g.gamma_plus + g.gamma_minus < 2.0 * g.gamma0 * g.gamma0
}

/// t_g = ħπ/V₁₂ (reduced units, ħ = 1).
pub fn gate_time(v12: f64) -> Result<f64> {
    if !(v12 > 0.0) {
        return Err(Error::Domain(format!("gate time needs V12 > 0, got {v12}")));
    }
    Ok(PI / v12)
}

pub fn controlled_phase(phi: f64) -> Mat4 {
    Mat4::from_diagonal(&Vector4::new(C1, C1, C1, Complex64::cis(phi)))
}

/// Conditional phase of the gate after time `t` for qubits `delta` sites apart.
pub fn conditional_phase(model: &Reduced, grid: &MomentumGrid, delta: i64, t: f64) -> Result<f64> {
    transient_phase(model, grid, delta, t)
}

/// Time at which the conditional phase reaches π, found by chord iteration
/// with slope V₁₂. Returns (t, V₁₂).
pub fn calibrate_gate_time(model: &Reduced, delta: i64) -> Result<(f64, f64)> {
    let r = delta.unsigned_abs() as f64 * model.spacing;
    let static_grid = MomentumGrid::thermodynamic(model, &QuadratureSpec::resolving(0.0, r))?;
    let v = mediated_potential(model, &static_grid, delta)?;
    let t0 = gate_time(v)?;
    let grid = MomentumGrid::thermodynamic(model, &QuadratureSpec::resolving(1.5 * t0, r))?;
    let mut t = t0;
    for _ in 0..100 {
        let f = conditional_phase(model, &grid, delta, t)? - PI;
        if f.abs() <= 1e-10 * PI {
            return Ok((t, v));
        }
        t = (t - f / v).clamp(0.0, 1.5 * t0);
    }
    Err(Error::Domain("conditional phase does not converge to pi".into()))
}

/// Haar-random pure state in C⁴.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R) -> Vector4<Complex64> {
    let v = Vector4::from_fn(|_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let n = v.norm();
    v / Complex64::from(n)
}

/// ⟨ψ|Λ(|ψ⟩⟨ψ|)|ψ⟩ through the element-wise map.
pub fn state_fidelity(psi: &Vector4<Complex64>, g: &GammaTriple) -> f64 {
    let rho = psi * psi.adjoint();
    let out = dephase_matrix(&rho, g);
    (psi.adjoint() * out * psi)[(0, 0)].re
}

/// Coefficients (c, c₀, c₋, c₊) with F(ψ) = c + c₀Γ₀ + c₋Γ₋ + c₊Γ₊.
pub fn fidelity_coefficients(psi: &Vector4<Complex64>) -> [f64; 4] {
    let p: [f64; 4] = std::array::from_fn(|a| psi[a].norm_sqr());
    let mut c = [0.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            let w = p[a] * p[b];
            let slot = if a == b {
                0
            } else if ((a >> 1) + (a & 1) + (b >> 1) + (b & 1)) % 2 == 1 {
                1
            } else if a + b == 3 && (a == 1 || a == 2) {
                2
            } else {
                3
            };
            c[slot] += w;
        }
    }
    c
}

/// Sample moments of the fidelity coefficients over Haar-random states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarMoments {
    pub samples: usize,
    pub mean: [f64; 4],
    pub covariance: [[f64; 4]; 4],
}

impl HaarMoments {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, samples: usize) -> Self {
        let mut mean = [0.0; 4];
        let mut m2 = [[0.0; 4]; 4];
        for n in 0..samples {
            let c = fidelity_coefficients(&haar_state(rng));
            let k = (n + 1) as f64;
            let delta: [f64; 4] = std::array::from_fn(|i| c[i] - mean[i]);
            for i in 0..4 {
                mean[i] += delta[i] / k;
            }
            for i in 0..4 {
                for j in 0..4 {
                    m2[i][j] += delta[i] * (c[j] - mean[j]);
                }
            }
        }
        let denom = (samples.max(2) - 1) as f64;
        let covariance = std::array::from_fn(|i| std::array::from_fn(|j| m2[i][j] / denom));
        HaarMoments {
            samples,
            mean,
            covariance,
        }
    }

    /// Sample mean of F and its standard error for one triple.
    pub fn fidelity(&self, g: &GammaTriple) -> (f64, f64) {
        let w = [1.0, g.gamma0, g.gamma_minus, g.gamma_plus];
        let mean: f64 = (0..4).map(|i| w[i] * self.mean[i]).sum();
        let mut var = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                var += w[i] * w[j] * self.covariance[i][j];
            }
        }
        (mean, (var.max(0.0) / self.samples as f64).sqrt())
    }
}

/// Largest element modulus.
pub fn max_norm(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
