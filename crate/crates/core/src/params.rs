// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Physical parameters of the condensate, the lattice and the interspecies
//! coupling, together with the conversion into the reduced unit system used by
//! every numerical routine in this crate.
//!
//! Reduced units: energies in recoil energies `E_R = (2πħ)²/(2 m_l λ²)`,
//! lengths in laser wavelengths `λ`, `ħ = 1` (so times are in `ħ/E_R`) and
//! temperatures as `k_B T / E_R`. In these units the impurity mass is `2π²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const K_B: f64 = 1.380_649e-23;
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Threshold below which a "much smaller than" ratio passes silently.
pub const REGIME_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    One = 1,
    Two = 2,
    Three = 3,
}

impl Dimension {
    pub fn get(self) -> usize {
        self as usize
    }

    pub fn from_usize(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            other => Err(Error::invalid("bec.dimension", format!("{other} is not 1, 2 or 3"))),
        }
    }
}

/// Homogeneous condensate, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BecParams {
    pub boson_mass_kg: f64,
    /// Number density in m^-D.
    pub density: f64,
    /// Boson-boson coupling in J m^D.
    pub g: f64,
    pub temperature_nk: f64,
    pub dimension: Dimension,
}

/// Lattice of impurity atoms, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub wavelength_m: f64,
    pub impurity_mass_kg: f64,
    /// Hopping J in joules.
    pub hopping: f64,
    /// On-site interaction U in joules.
    pub onsite_u: f64,
    /// Harmonic frequency of a single lattice well, s^-1.
    pub trap_frequency: f64,
    /// Stark tilt per site K in joules.
    pub stark: f64,
    pub sites: usize,
}

/// Interspecies density-density coupling, J m^D.
///
/// `kappa` is the coupling of the state that interacts with the condensate.
/// For two internal states the couplings are `kappa0` (default 0) and
/// `kappa1` (default `kappa`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    pub kappa: f64,
    pub kappa0: f64,
    pub kappa1: Option<f64>,
}

impl CouplingParams {
    pub fn new(kappa: f64) -> Self {
        CouplingParams {
            kappa,
            kappa0: 0.0,
            kappa1: None,
        }
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1.unwrap_or(self.kappa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub bec: BecParams,
    pub lattice: LatticeParams,
    pub coupling: CouplingParams,
}

/// Derived length, velocity and energy scales in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    /// ξ = ħ/√(2 m_b g n0), m.
    pub healing_length: f64,
    /// c = √(g n0/m_b), m/s.
    pub sound_speed: f64,
    /// x0 = √(ħ/(m_l ω_t)), m.
    pub oscillator_length: f64,
    /// E_R = (2πħ)²/(2 m_l λ²), J.
    pub recoil_energy: f64,
    /// a = λ/2, m.
    pub site_spacing: f64,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        positive("bec.mass_kg", self.bec.boson_mass_kg)?;
        positive("bec.density", self.bec.density)?;
        positive("bec.g", self.bec.g)?;
        if !(self.bec.temperature_nk >= 0.0 && self.bec.temperature_nk.is_finite()) {
            return Err(Error::invalid("bec.temperature_nK", "must be finite and >= 0"));
        }
        positive("lattice.wavelength_nm", self.lattice.wavelength_m)?;
        positive("lattice.mass_kg", self.lattice.impurity_mass_kg)?;
        positive("lattice.omega_t", self.lattice.trap_frequency)?;
        if !(self.lattice.hopping >= 0.0 && self.lattice.hopping.is_finite()) {
            return Err(Error::invalid("lattice.J", "must be finite and >= 0"));
        }
        if !self.lattice.onsite_u.is_finite() {
            return Err(Error::invalid("lattice.U", "must be finite"));
        }
        if !self.lattice.stark.is_finite() {
            return Err(Error::invalid("lattice.K", "must be finite"));
        }
        if self.lattice.sites < 2 {
            return Err(Error::invalid("lattice.sites", "need at least 2 sites"));
        }
        for (name, v) in [
            ("coupling.kappa", self.coupling.kappa),
            ("coupling.kappa0", self.coupling.kappa0),
            ("coupling.kappa1", self.coupling.kappa1()),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn units(&self) -> Units {
        Units::new(self.lattice.wavelength_m, self.lattice.impurity_mass_kg)
    }

    /// Converts to the reduced unit system. Fails on invalid parameters.
    pub fn reduced(&self) -> Result<Reduced> {
        self.validate()?;
        let u = self.units();
        let dim = self.bec.dimension.get();
        let len_d = u.length.powi(dim as i32);
        let e = u.energy;
        let mass_unit = self.lattice.impurity_mass_kg / (2.0 * PI * PI);
        let trap = self.lattice.trap_frequency * u.time;
        let impurity_mass = 2.0 * PI * PI;
        Ok(Reduced {
            dim,
            boson_mass: self.bec.boson_mass_kg / mass_unit,
            density: self.bec.density * len_d,
            g: self.bec.g / (e * len_d),
            kappa: self.coupling.kappa / (e * len_d),
            kappa0: self.coupling.kappa0 / (e * len_d),
            kappa1: self.coupling.kappa1() / (e * len_d),
            kt: u.temperature_from_nk(self.bec.temperature_nk),
            x0: (1.0 / (impurity_mass * trap)).sqrt(),
            spacing: 0.5,
            hopping: self.lattice.hopping / e,
            onsite_u: self.lattice.onsite_u / e,
            stark: self.lattice.stark / e,
            sites: self.lattice.sites,
        })
    }
}

/// Derives ξ, c, x0, E_R and a from the SI parameters.
pub fn derive(bec: &BecParams, lattice: &LatticeParams) -> Result<DerivedQuantities> {
    positive("bec.mass_kg", bec.boson_mass_kg)?;
    positive("bec.density", bec.density)?;
    positive("bec.g", bec.g)?;
    positive("lattice.mass_kg", lattice.impurity_mass_kg)?;
    positive("lattice.wavelength_nm", lattice.wavelength_m)?;
    positive("lattice.omega_t", lattice.trap_frequency)?;
    let gn0 = bec.g * bec.density;
    Ok(DerivedQuantities {
        healing_length: HBAR / (2.0 * bec.boson_mass_kg * gn0).sqrt(),
        sound_speed: (gn0 / bec.boson_mass_kg).sqrt(),
        oscillator_length: (HBAR / (lattice.impurity_mass_kg * lattice.trap_frequency)).sqrt(),
        recoil_energy: recoil_energy(lattice.impurity_mass_kg, lattice.wavelength_m),
        site_spacing: 0.5 * lattice.wavelength_m,
    })
}

pub fn recoil_energy(mass_kg: f64, wavelength_m: f64) -> f64 {
    let h = 2.0 * PI * HBAR;
    h * h / (2.0 * mass_kg * wavelength_m * wavelength_m)
}

/// Harmonic frequency of a lattice well of depth `depth` (in E_R):
/// ħω_t = 2√(V0 E_R).
pub fn trap_frequency_from_depth(depth_er: f64, mass_kg: f64, wavelength_m: f64) -> f64 {
    2.0 * depth_er.sqrt() * recoil_energy(mass_kg, wavelength_m) / HBAR
}

/// Conversion factors between SI and reduced units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    /// E_R in joules.
    pub energy: f64,
    /// λ in metres.
    pub length: f64,
    /// ħ/E_R in seconds.
    pub time: f64,
}

impl Units {
    pub fn new(wavelength_m: f64, impurity_mass_kg: f64) -> Self {
        let energy = recoil_energy(impurity_mass_kg, wavelength_m);
        Units {
            energy,
            length: wavelength_m,
            time: HBAR / energy,
        }
    }

    pub fn temperature_from_nk(&self, t_nk: f64) -> f64 {
        t_nk * 1e-9 * K_B / self.energy
    }

    pub fn temperature_to_nk(&self, kt: f64) -> f64 {
        kt * self.energy / (K_B * 1e-9)
    }

    pub fn time_from_ms(&self, t_ms: f64) -> f64 {
        t_ms * 1e-3 / self.time
    }

    pub fn time_to_ms(&self, t: f64) -> f64 {
        t * self.time * 1e3
    }

    pub fn energy_to_nk(&self, e: f64) -> f64 {
        self.temperature_to_nk(e)
    }
}

/// Parameters in reduced units. Everything downstream works with this.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reduced {
    pub dim: usize,
    pub boson_mass: f64,
    pub density: f64,
    pub g: f64,
    pub kappa: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    pub kt: f64,
    pub x0: f64,
    pub spacing: f64,
    pub hopping: f64,
    pub onsite_u: f64,
    pub stark: f64,
    pub sites: usize,
}

impl Reduced {
    pub fn gn0(&self) -> f64 {
        self.g * self.density
    }

    pub fn healing_length(&self) -> f64 {
        1.0 / (2.0 * self.boson_mass * self.gn0()).sqrt()
    }

    pub fn sound_speed(&self) -> f64 {
        (self.gn0() / self.boson_mass).sqrt()
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self.kappa1 = kappa;
        self
    }

    pub fn with_kt(mut self, kt: f64) -> Self {
        self.kt = kt;
        self
    }
}

/// Bose occupation 1/(exp(E/k_B T) − 1) for an energy in joules and a
/// temperature in kelvin.
pub fn thermal_occupation(energy_j: f64, temperature_k: f64) -> Result<f64> {
    occupation(energy_j, K_B * temperature_k)
}

/// Bose occupation with energy and k_B T in the same units.
pub fn occupation(energy: f64, kt: f64) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::Domain(format!(
            "thermal occupation needs a positive mode energy, got {energy}"
        )));
    }
    if kt < 0.0 {
        return Err(Error::Domain(format!("negative temperature {kt}")));
    }
    if kt == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (energy / kt).exp_m1())
}

/// 2N + 1 = coth(E/2k_BT); equal to 1 at zero temperature.
pub(crate) fn thermal_factor(energy: f64, kt: f64) -> f64 {
    if kt <= 0.0 {
        return 1.0;
    }
    let x = energy / kt;
    if x > 700.0 {
        1.0
    } else {
        1.0 + 2.0 / x.exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeCondition {
    /// |κ|/(g n0 ξ^D) ≪ 1.
    WeakCoupling,
    /// J a/ħ ≪ c.
    SlowHopping,
    /// E_p ≪ J.
    Born,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeWarning {
    pub condition: RegimeCondition,
    pub ratio: f64,
}

/// Dimensionless ratios of the three validity conditions. The Born ratio is
/// `None` when J = 0.
pub fn regime_ratios(model: &Reduced) -> Result<[(RegimeCondition, Option<f64>); 3]> {
    let xi = model.healing_length();
    let weak = model.kappa.abs() / (model.gn0() * xi.powi(model.dim as i32));
    let slow = model.hopping * model.spacing / model.sound_speed();
    let born = if model.hopping > 0.0 {
        let grid = crate::bogoliubov::MomentumGrid::thermodynamic(
            model,
            &crate::bogoliubov::QuadratureSpec::default(),
        )?;
        let ep = crate::interaction::polaron_energy(model, &grid)?;
        Some(ep.abs() / model.hopping)
    } else {
        None
    };
    Ok([
        (RegimeCondition::WeakCoupling, Some(weak)),
        (RegimeCondition::SlowHopping, Some(slow)),
        (RegimeCondition::Born, born),
    ])
}

/// Advisory checks; a warning is emitted for every ratio at or above
/// [`REGIME_THRESHOLD`].
pub fn validate_regime(model: &Reduced) -> Result<Vec<RegimeWarning>> {
    Ok(regime_ratios(model)?
        .into_iter()
        .filter_map(|(condition, ratio)| {
            ratio
                .filter(|r| *r >= REGIME_THRESHOLD)
                .map(|ratio| RegimeWarning { condition, ratio })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rb_k_1d() -> (BecParams, LatticeParams) {
        let lambda = 790e-9;
        let m_k = 40.961_825_76 * AMU;
        let er = recoil_energy(m_k, lambda);
        let bec = BecParams {
            boson_mass_kg: 86.909_180_527 * AMU,
            density: 5e6,
            g: 1.1e-2 * er * lambda,
            temperature_nk: 3.0,
            dimension: Dimension::One,
        };
        let lattice = LatticeParams {
            wavelength_m: lambda,
            impurity_mass_kg: m_k,
            hopping: 0.0,
            onsite_u: 0.4 * er,
            trap_frequency: trap_frequency_from_depth(15.0, m_k, lambda),
            stark: 0.0,
            sites: 800,
        };
        (bec, lattice)
    }

    #[test]
    fn derived_quantities_match_hand_calculation() {
        let (bec, lattice) = rb_k_1d();
        let d = derive(&bec, &lattice).unwrap();
        // Hand computation in SI units:
        // E_R(K-41, 790 nm) = h²/(2 m λ²) = 5.1714e-30 J, g n0 = 0.011·E_R·λ·5e6 m⁻¹,
        // ξ = ħ/√(2 m_b g n0) = 4.1411e-7 m, c = √(g n0/m_b) = 1.2478e-3 m/s.
        assert_relative_eq!(d.recoil_energy, 5.17134e-30, max_relative = 1e-4);
        let gn0 = 0.011 * d.recoil_energy * 790e-9 * 5e6;
        let mb = 86.909_180_527 * 1.660_539_066_60e-27;
        assert_relative_eq!(
            d.healing_length,
            1.054_571_817e-34 / (2.0 * mb * gn0).sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(d.healing_length, 4.1411e-7, max_relative = 1e-3);
        assert_relative_eq!(d.sound_speed, 1.2478e-3, max_relative = 1e-3);
        assert_relative_eq!(d.site_spacing, 395e-9);
        assert!(d.oscillator_length > 0.0 && d.oscillator_length < d.site_spacing);
    }

    #[test]
    fn healing_length_scales_as_inverse_sqrt_g() {
        let (bec, lattice) = rb_k_1d();
        let d1 = derive(&bec, &lattice).unwrap();
        let bec4 = BecParams { g: 4.0 * bec.g, ..bec };
        let d4 = derive(&bec4, &lattice).unwrap();
        assert_relative_eq!(d4.healing_length, 0.5 * d1.healing_length, max_relative = 1e-14);
    }

    #[test]
    fn derive_rejects_nonpositive_inputs() {
        let (bec, lattice) = rb_k_1d();
        let bad = BecParams { density: 0.0, ..bec };
        assert!(matches!(derive(&bad, &lattice), Err(Error::InvalidParameter { .. })));
        let bad = BecParams { g: -1.0, ..bec };
        assert!(derive(&bad, &lattice).is_err());
    }

    #[test]
    fn derive_is_pure() {
        let (bec, lattice) = rb_k_1d();
        let a = derive(&bec, &lattice).unwrap();
        let b = derive(&bec, &lattice).unwrap();
        assert_eq!(a.healing_length.to_bits(), b.healing_length.to_bits());
        assert_eq!(a.sound_speed.to_bits(), b.sound_speed.to_bits());
    }

    #[test]
    fn reduced_units_agree_with_si() {
        let (bec, lattice) = rb_k_1d();
        let p = SystemParams {
            bec,
            lattice,
            coupling: CouplingParams::new(2.5e-2 * recoil_energy(lattice.impurity_mass_kg, 790e-9) * 790e-9),
        };
        let r = p.reduced().unwrap();
        let d = derive(&bec, &lattice).unwrap();
        assert_relative_eq!(r.healing_length() * 790e-9, d.healing_length, max_relative = 1e-12);
        assert_relative_eq!(r.x0 * 790e-9, d.oscillator_length, max_relative = 1e-12);
        let u = p.units();
        assert_relative_eq!(
            r.sound_speed() * u.length / u.time,
            d.sound_speed,
            max_relative = 1e-12
        );
        assert_relative_eq!(r.kappa, 2.5e-2, max_relative = 1e-12);
        assert_relative_eq!(r.g, 1.1e-2, max_relative = 1e-12);
        assert_relative_eq!(u.temperature_to_nk(r.kt), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn occupation_values() {
        assert_eq!(occupation(1.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(occupation(1.0, 1.0).unwrap(), 0.581_976_706_869_326_4, max_relative = 1e-14);
        assert_relative_eq!(occupation(2.0, 1.0).unwrap(), 0.156_517_642_749_665_5, max_relative = 1e-14);
        assert!(occupation(0.0, 1.0).is_err());
        assert!(thermal_occupation(-1e-30, 1e-9).is_err());
        let e = K_B * 1e-8;
        assert_relative_eq!(
            thermal_occupation(e, 1e-8).unwrap(),
            1.0 / (std::f64::consts::E - 1.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn thermal_factor_is_two_n_plus_one() {
        for &(e, kt) in &[(0.3, 1.0), (2.0, 0.1), (1e-4, 3.0)] {
            let n = occupation(e, kt).unwrap();
            assert_relative_eq!(thermal_factor(e, kt), 2.0 * n + 1.0, max_relative = 1e-12);
        }
        assert_eq!(thermal_factor(1.0, 0.0), 1.0);
    }

    #[test]
    fn zero_kappa_gives_no_warnings_when_hopping_is_off() {
        let (bec, lattice) = rb_k_1d();
        let p = SystemParams { bec, lattice, coupling: CouplingParams::new(0.0) };
        let w = validate_regime(&p.reduced().unwrap()).unwrap();
        assert!(w.is_empty(), "{w:?}");
    }

    #[test]
    fn born_check_suppressed_without_hopping() {
        let (bec, lattice) = rb_k_1d();
        let er = recoil_energy(lattice.impurity_mass_kg, 790e-9);
        let p = SystemParams { bec, lattice, coupling: CouplingParams::new(2.5e-2 * er * 790e-9) };
        let ratios = regime_ratios(&p.reduced().unwrap()).unwrap();
        assert_eq!(ratios[2].1, None);
        // |κ|/(g n0 ξ) for the 1D cluster parameters: 0.025/(0.011·3.95·0.524) = 1.10.
        let weak = ratios[0].1.unwrap();
        assert_relative_eq!(weak, 1.098, max_relative = 2e-3);
        let warnings = validate_regime(&p.reduced().unwrap()).unwrap();
        assert!(warnings.iter().any(|w| w.condition == RegimeCondition::WeakCoupling));
    }
}
