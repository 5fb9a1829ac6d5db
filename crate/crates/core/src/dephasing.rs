// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dephasing factors of one and two impurity qubits.
//!
//! All three factors of a [`GammaTriple`] share the exponent
//! `A = Σ' d_q (1 − cos ω_q t)(2N_q + 1)/(ħω_q)²` and the separation-dependent
//! part `D = Σ' d_q (1 − cos ω_q t)(2N_q + 1)(1 − cos q·Δr)/(ħω_q)²`:
//! `Γ₀ = e^{-A}`, `Γ₋ = e^{-2D}`, `Γ₊ = e^{-(4A − 2D)}`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::bogoliubov::{GridNode, MomentumGrid, Phonons, SeparationKernel};
use crate::error::{Error, Result};
use crate::params::Reduced;

/// Time argument of a dephasing evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeMode {
    At(f64),
    /// 1 − cos ω_q t replaced by its time average 1.
    LongTime,
}

impl TimeMode {
    fn factor(self, omega: f64) -> f64 {
        match self {
            TimeMode::At(t) => {
                let s = (0.5 * omega * t).sin();
                2.0 * s * s
            }
            TimeMode::LongTime => 1.0,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            TimeMode::At(t) if !(t >= 0.0) || !t.is_finite() => {
                Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTriple {
    pub gamma0: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

impl GammaTriple {
    pub const IDENTITY: GammaTriple = GammaTriple {
        gamma0: 1.0,
        gamma_minus: 1.0,
        gamma_plus: 1.0,
    };

    pub fn new(gamma0: f64, gamma_minus: f64, gamma_plus: f64) -> Result<Self> {
        for (name, v) in [
            ("gamma0", gamma0),
            ("gamma_minus", gamma_minus),
            ("gamma_plus", gamma_plus),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, format!("{v} is outside [0, 1]")));
            }
        }
        Ok(GammaTriple {
            gamma0,
            gamma_minus,
            gamma_plus,
        })
    }
}

/// A triple together with its evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub triple: GammaTriple,
    pub time: TimeMode,
    /// k_B T in E_R.
    pub kt: f64,
    /// Separation in λ.
    pub separation: f64,
    /// Set for one-dimensional condensates, where the factors vanish as t or
    /// the separation grows without bound.
    pub one_dimensional_caveat: bool,
}

/// The shared exponents (A, D).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub onsite: f64,
    pub relative: f64,
}

impl Exponents {
    pub fn triple(&self) -> GammaTriple {
        GammaTriple {
            gamma0: (-self.onsite).exp(),
            gamma_minus: (-2.0 * self.relative).exp(),
            gamma_plus: (-(4.0 * self.onsite - 2.0 * self.relative)).exp(),
        }
    }
}

fn dephasing_phonons(model: &Reduced) -> Phonons {
    Phonons::with_kappa(model, model.kappa1 - model.kappa0)
}

/// 1 − (angular average of cos q·Δr), stable at small arguments.
pub(crate) fn one_minus_separation(grid: &MomentumGrid, node: &GridNode, r: f64) -> f64 {
    match grid.separation {
        SeparationKernel::Plane => {
            let s = (0.5 * node.qx * r).sin();
            2.0 * s * s
        }
        SeparationKernel::Bessel => {
            let x = node.q * r;
            if x.abs() < 1e-2 {
                let x2 = x * x;
                x2 / 4.0 - x2 * x2 / 64.0 + x2 * x2 * x2 / 2304.0
            } else {
                1.0 - puruspe::bessel::Jn(0, x)
            }
        }
        SeparationKernel::Sinc => {
            let x = node.q * r;
            if x.abs() < 1e-2 {
                let x2 = x * x;
                x2 / 6.0 - x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0
            } else {
                1.0 - x.sin() / x
            }
        }
    }
}

fn infrared_divergent(model: &Reduced) -> bool {
    model.dim == 1 || (model.dim == 2 && model.kt > 0.0)
}

/// Exponents A and D at separation `r` (in λ).
pub fn exponents(model: &Reduced, grid: &MomentumGrid, r: f64, time: TimeMode) -> Result<Exponents> {
    time.validate()?;
    if let TimeMode::At(t) = time {
        if t == 0.0 {
            return Ok(Exponents {
                onsite: 0.0,
                relative: 0.0,
            });
        }
    }
    if time == TimeMode::LongTime && infrared_divergent(model) {
        return Err(Error::Domain(
            "long-time on-site exponent diverges in the infrared for this dimension and temperature"
                .into(),
        ));
    }
    let ph = dephasing_phonons(model);
    let onsite = grid.sum(|n| ph.dephasing_density(n.q) * time.factor(ph.energy(n.q)))?;
    let relative = grid.sum(|n| {
        ph.dephasing_density(n.q) * time.factor(ph.energy(n.q)) * one_minus_separation(grid, n, r)
    })?;
    Ok(Exponents { onsite, relative })
}

/// Dephasing factor of a coherence between impurity positions γ and β
/// (site indices), `exp(−Σ' |F_β − F_γ|² (1 − cos ω t)(2N+1)/(ħω)²)`.
pub fn gamma_pair(model: &Reduced, grid: &MomentumGrid, gamma: i64, beta: i64, time: TimeMode) -> Result<f64> {
    if gamma == beta {
        time.validate()?;
        return Ok(1.0);
    }
    let r = (beta - gamma).unsigned_abs() as f64 * model.spacing;
    time.validate()?;
    if let TimeMode::At(t) = time {
        if t == 0.0 {
            return Ok(1.0);
        }
    }
    let ph = dephasing_phonons(model);
    let relative = grid.sum(|n| {
        ph.dephasing_density(n.q) * time.factor(ph.energy(n.q)) * one_minus_separation(grid, n, r)
    })?;
    Ok((-2.0 * relative).exp())
}

/// (Γ₀, Γ₋, Γ₊) at separation `r` (in λ), all on the same nodes.
pub fn gamma_triple(model: &Reduced, grid: &MomentumGrid, r: f64, time: TimeMode) -> Result<GammaPoint> {
    let e = exponents(model, grid, r, time)?;
    Ok(GammaPoint {
        triple: e.triple(),
        time,
        kt: model.kt,
        separation: r,
        one_dimensional_caveat: model.dim == 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundRegime {
    ZeroTemperature,
    HighTemperature,
    /// Neither limit applies; the smaller of the two bounds is returned.
    Crossover,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaBound {
    pub value: f64,
    pub regime: BoundRegime,
}

/// x = κ²/(√2 π² g² n0 ξ³), the exponent scale of the zero-temperature bounds.
pub fn bound_exponent_3d(model: &Reduced) -> Result<f64> {
    if model.dim != 3 {
        return Err(Error::UnsupportedDimension(model.dim));
    }
    let k = model.kappa1 - model.kappa0;
    let xi = model.healing_length();
    Ok(k * k / (SQRT_2 * PI * PI * model.g * model.g * model.density * xi.powi(3)))
}

/// Closed-form lower bounds on Γ in three dimensions.
pub fn gamma_bound_3d(model: &Reduced) -> Result<GammaBound> {
    let x = bound_exponent_3d(model)?;
    let zero = (-4.0 * x).exp();
    let k = model.kappa1 - model.kappa0;
    let xi = model.healing_length();
    let gn0 = model.gn0();
    let high = (-k * k * model.kt / (SQRT_2 * PI * model.g.powi(3) * model.density.powi(2) * xi.powi(3))).exp();
    Ok(if model.kt <= 0.1 * gn0 {
        GammaBound {
            value: zero,
            regime: BoundRegime::ZeroTemperature,
        }
    } else if model.kt >= 10.0 * gn0 {
        GammaBound {
            value: high,
            regime: BoundRegime::HighTemperature,
        }
    } else {
        GammaBound {
            value: zero.min(high),
            regime: BoundRegime::Crossover,
        }
    })
}

/// Zero-temperature bound triple Γ_x = exp(−c_x x) with c₀ = 1, c₋ = 2, c₊ = 4.
pub fn gamma_bound_triple_3d(model: &Reduced) -> Result<GammaTriple> {
    let x = bound_exponent_3d(model)?;
    GammaTriple::new((-x).exp(), (-2.0 * x).exp(), (-4.0 * x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::QuadratureSpec;
    use crate::presets;
    use approx::assert_relative_eq;

    fn fig2() -> (Reduced, MomentumGrid) {
        let p = presets::fig2_dephasing_1d();
        let m = p.reduced().unwrap();
        let t = p.units().time_from_ms(10.0);
        let g = MomentumGrid::thermodynamic(&m, &QuadratureSpec::resolving(t, 100.0 * m.spacing)).unwrap();
        (m, g)
    }

    #[test]
    fn trivial_values() {
        let (m, g) = fig2();
        assert_eq!(gamma_pair(&m, &g, 0, 5, TimeMode::At(0.0)).unwrap(), 1.0);
        assert_eq!(gamma_pair(&m, &g, 3, 3, TimeMode::At(50.0)).unwrap(), 1.0);
        let off = m.with_kappa(0.0);
        let t = gamma_triple(&off, &g, 2.5, TimeMode::At(50.0)).unwrap().triple;
        assert_eq!(t, GammaTriple::IDENTITY);
        assert!(gamma_pair(&m, &g, 0, 1, TimeMode::At(-1.0)).is_err());
    }

    #[test]
    fn zero_separation_degenerates() {
        let (m, g) = fig2();
        let t = gamma_triple(&m, &g, 0.0, TimeMode::At(100.0)).unwrap().triple;
        assert_eq!(t.gamma_minus, 1.0);
        assert_relative_eq!(t.gamma_plus, t.gamma0.powi(4), max_relative = 1e-12);
    }

    #[test]
    fn product_identity_and_ordering() {
        let (m, g) = fig2();
        for &t in &[5.0, 40.0, 151.0] {
            let p = gamma_triple(&m, &g, 2.5, TimeMode::At(t)).unwrap().triple;
            assert_relative_eq!(p.gamma_plus * p.gamma_minus, p.gamma0.powi(4), max_relative = 1e-10);
            if t > 20.0 {
                assert!(p.gamma_minus >= p.gamma_plus, "{p:?}");
            }
        }
    }

    #[test]
    fn pair_equals_gamma_minus() {
        let (m, g) = fig2();
        let t = gamma_triple(&m, &g, 5.0 * m.spacing, TimeMode::At(80.0)).unwrap().triple;
        let p = gamma_pair(&m, &g, 0, 5, TimeMode::At(80.0)).unwrap();
        assert_relative_eq!(p, t.gamma_minus, max_relative = 1e-14);
    }

    #[test]
    fn long_time_mode_rejects_infrared_divergence() {
        let (m, g) = fig2();
        assert!(matches!(
            exponents(&m, &g, 1.0, TimeMode::LongTime),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bounds() {
        let m = presets::nacs_gate_3d().reduced().unwrap();
        let b = gamma_bound_3d(&m).unwrap();
        assert_eq!(b.regime, BoundRegime::ZeroTemperature);
        let t = gamma_bound_triple_3d(&m).unwrap();
        assert_relative_eq!(t.gamma_minus, t.gamma0.powi(2), max_relative = 1e-14);
        assert_relative_eq!(t.gamma_plus, t.gamma0.powi(4), max_relative = 1e-14);
        assert_relative_eq!(b.value, t.gamma_plus, max_relative = 1e-14);
        assert_eq!(gamma_bound_3d(&m.with_kappa(0.0)).unwrap().value, 1.0);
        let one_d = presets::fig2_dephasing_1d().reduced().unwrap();
        assert!(matches!(gamma_bound_3d(&one_d), Err(Error::UnsupportedDimension(1))));
    }

    #[test]
    fn long_time_quadrature_respects_bound() {
        let m = presets::nacs_gate_3d().reduced().unwrap();
        let g = MomentumGrid::thermodynamic(&m, &QuadratureSpec::resolving(0.0, 0.5)).unwrap();
        let p = gamma_triple(&m, &g, 0.5, TimeMode::LongTime).unwrap().triple;
        let b = gamma_bound_3d(&m).unwrap().value;
        assert!(p.gamma0 >= b && p.gamma_minus >= b && p.gamma_plus >= b);
        // With point-like impurities the on-site exponent is x/2 exactly.
        let mut point = m;
        point.x0 = 1e-3 * m.healing_length();
        let g = MomentumGrid::thermodynamic(&point, &QuadratureSpec::default()).unwrap();
        let e = exponents(&point, &g, 0.0, TimeMode::LongTime).unwrap();
        assert_relative_eq!(e.onsite, 0.5 * bound_exponent_3d(&point).unwrap(), max_relative = 2e-3);
    }
}
