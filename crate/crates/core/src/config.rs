// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Flat key-value run configuration.
//!
//! A config is a TOML document; nested tables are flattened to dotted keys
//! (`[bec] g = 0.011` and `bec.g = 0.011` are the same key). Couplings are
//! given in E_R·λ^D, energies in E_R, temperatures in nK.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::{recoil_energy, trap_frequency_from_depth, Dimension, SystemParams};
use crate::presets::Preset;

/// Every accepted key with its unit or meaning.
pub const KEYS: &[(&str, &str)] = &[
    ("preset", "base parameter set: fig2, fig3, fig4, fig5, fig6, nacs-gate"),
    ("bec.mass_kg", "boson mass, kg"),
    ("bec.density", "condensate density, m^-D"),
    ("bec.g", "boson-boson coupling, E_R lambda^D"),
    ("bec.temperature_nK", "temperature, nK"),
    ("bec.dimension", "condensate dimension, 1, 2 or 3"),
    ("lattice.wavelength_nm", "lattice wavelength, nm"),
    ("lattice.mass_kg", "impurity mass, kg"),
    ("lattice.J", "hopping, E_R"),
    ("lattice.U", "on-site interaction, E_R"),
    ("lattice.omega_t", "well frequency, rad/s"),
    ("lattice.depth_ER", "lattice depth, E_R (sets lattice.omega_t)"),
    ("lattice.K", "Stark tilt per site, E_R"),
    ("lattice.K_hz", "Stark tilt per site as K/hbar, rad/s"),
    ("lattice.sites", "sites per axis"),
    ("coupling.kappa", "impurity-boson coupling, E_R lambda^D"),
    ("coupling.kappa0", "coupling of qubit state 0, E_R lambda^D"),
    ("coupling.kappa1", "coupling of qubit state 1, E_R lambda^D"),
    ("grid.mode", "thermodynamic or finite"),
    ("grid.q_max_factor", "momentum cutoff multiplier"),
    ("grid.tolerance", "relative quadrature tolerance"),
    ("grid.n_max", "finite-ring mode count"),
    ("grid.length_sites", "finite-ring length in sites"),
    ("potential.delta_max", "largest tabulated separation, sites"),
    ("dephasing.axis", "time, distance or temperature"),
    ("dephasing.min", "scan start (ms, sites or nK)"),
    ("dephasing.max", "scan end (ms, sites or nK)"),
    ("dephasing.points", "scan points"),
    ("dephasing.time_ms", "fixed time when not scanned, ms"),
    ("dephasing.long_time", "use the t -> infinity limit when not scanning time"),
    ("dephasing.separation", "fixed separation when not scanned, sites"),
    ("gate.separation", "qubit separation, sites"),
    ("gate.calibrate", "solve phi(t_g) = pi on the transient phase"),
    ("gate.haar_samples", "Haar states for the sampled fidelity"),
    ("gate.time_ms", "gate time, ms (default: pi hbar/V12)"),
    ("mc.steps", "Metropolis steps per seed after equilibration"),
    ("mc.equilibration", "equilibration steps per seed"),
    ("mc.sample_interval", "steps between samples"),
    ("mc.seeds", "independent chains per temperature"),
    ("mc.atoms", "number of impurity atoms"),
    ("mc.potential_mode", "nn or full"),
    ("mc.pair_counting", "ordered or unordered"),
    ("mc.moves", "global or local"),
    ("mc.delta_max", "potential truncation for full mode, sites"),
    ("mc.t_min_nK", "lowest temperature, nK"),
    ("mc.t_max_nK", "highest temperature, nK"),
    ("mc.t_points", "temperature points"),
    ("mc.snapshot", "write the final configuration of the first seed"),
    ("transport.t_end_ms", "evolution time, ms"),
    ("transport.dt", "fixed step, hbar/E_R"),
    ("transport.record_every", "steps between stored populations"),
    ("transport.j0", "initial site (default: centre)"),
    ("transport.kappa_min", "crossover scan start, E_R lambda"),
    ("transport.kappa_max", "crossover scan end, E_R lambda"),
    ("transport.kappa_points", "crossover scan points"),
    ("transport.positivity_abort", "abort when an eigenvalue of rho drops below minus this value"),
    ("bloch.periods", "Bloch periods to evolve"),
];

pub fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

fn unknown(key: &str) -> Error {
    let valid: Vec<&str> = KEYS.iter().map(|(k, _)| *k).collect();
    Error::Configuration(format!("unknown key `{key}`; valid keys: {}", valid.join(", ")))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, toml::Value>,
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Configuration(e.to_string()))?;
        let mut values = BTreeMap::new();
        flatten("", &table, &mut values);
        if let Some(k) = values.keys().find(|k| !is_known(k)) {
            return Err(unknown(k));
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies `key=value`; the value is read as TOML, falling back to a string.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, raw) = spec
            .split_once('=')
            .ok_or_else(|| Error::Configuration(format!("override `{spec}` is not key=value")))?;
        let key = key.trim();
        if !is_known(key) {
            return Err(unknown(key));
        }
        let raw = raw.trim();
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        self.values.insert(key.to_string(), value);
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: toml::Value) -> Result<()> {
        if !is_known(key) {
            return Err(unknown(key));
        }
        self.values.insert(key.to_string(), value);
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn entries(&self) -> &BTreeMap<String, toml::Value> {
        &self.values
    }

    pub fn f64(&self, key: &'static str) -> Result<Option<f64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(*x)),
            Some(toml::Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(Error::invalid(key, format!("expected a number, got {v}"))),
        }
    }

    pub fn usize(&self, key: &'static str) -> Result<Option<usize>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(toml::Value::Float(x)) if *x >= 0.0 && x.fract() == 0.0 && *x < 9e15 => Ok(Some(*x as usize)),
            Some(v) => Err(Error::invalid(key, format!("expected a non-negative integer, got {v}"))),
        }
    }

    pub fn bool(&self, key: &'static str) -> Result<Option<bool>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(toml::Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(Error::invalid(key, format!("expected true or false, got {v}"))),
        }
    }

    pub fn str(&self, key: &'static str) -> Result<Option<&str>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.as_str())),
            Some(v) => Err(Error::invalid(key, format!("expected a string, got {v}"))),
        }
    }

    pub fn f64_or(&self, key: &'static str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &'static str, default: usize) -> Result<usize> {
        Ok(self.usize(key)?.unwrap_or(default))
    }

    pub fn bool_or(&self, key: &'static str, default: bool) -> Result<bool> {
        Ok(self.bool(key)?.unwrap_or(default))
    }

    pub fn preset(&self, default: Preset) -> Result<Preset> {
        match self.str("preset")? {
            None => Ok(default),
            Some(name) => Preset::from_name(name)
                .ok_or_else(|| Error::invalid("preset", format!("unknown preset `{name}`"))),
        }
    }

    /// Physical parameters: the preset with every bec/lattice/coupling key
    /// applied on top.
    pub fn system_params(&self, default: Preset) -> Result<SystemParams> {
        let base = self.preset(default)?.params();
        let old_er = recoil_energy(base.lattice.impurity_mass_kg, base.lattice.wavelength_m);
        let old_len = base.lattice.wavelength_m.powi(base.bec.dimension.get() as i32);
        let old_scale = old_er * old_len;

        let mut p = base;
        if let Some(v) = self.f64("bec.mass_kg")? {
            p.bec.boson_mass_kg = v;
        }
        if let Some(v) = self.f64("bec.density")? {
            p.bec.density = v;
        }
        if let Some(v) = self.f64("bec.temperature_nK")? {
            p.bec.temperature_nk = v;
        }
        if let Some(v) = self.usize("bec.dimension")? {
            p.bec.dimension = Dimension::from_usize(v)?;
        }
        if let Some(v) = self.f64("lattice.wavelength_nm")? {
            p.lattice.wavelength_m = v * 1e-9;
        }
        if let Some(v) = self.f64("lattice.mass_kg")? {
            p.lattice.impurity_mass_kg = v;
        }
        if let Some(v) = self.usize("lattice.sites")? {
            p.lattice.sites = v;
        }
        let er = recoil_energy(p.lattice.impurity_mass_kg, p.lattice.wavelength_m);
        let scale = er * p.lattice.wavelength_m.powi(p.bec.dimension.get() as i32);

        // Reduced values of the base survive changes of the unit system.
        let coupling = |key: &'static str, base: f64| -> Result<f64> {
            Ok(match self.f64(key)? {
                Some(v) => v * scale,
                None => rescale(base, old_scale, scale),
            })
        };
        p.bec.g = coupling("bec.g", base.bec.g)?;
        p.coupling.kappa = coupling("coupling.kappa", base.coupling.kappa)?;
        p.coupling.kappa0 = coupling("coupling.kappa0", base.coupling.kappa0)?;
        p.coupling.kappa1 = match self.f64("coupling.kappa1")? {
            Some(v) => Some(v * scale),
            None => base.coupling.kappa1.map(|k| rescale(k, old_scale, scale)),
        };
        let energy = |key: &'static str, base: f64| -> Result<f64> {
            Ok(match self.f64(key)? {
                Some(v) => v * er,
                None => rescale(base, old_er, er),
            })
        };
        p.lattice.hopping = energy("lattice.J", base.lattice.hopping)?;
        p.lattice.onsite_u = energy("lattice.U", base.lattice.onsite_u)?;
        p.lattice.stark = match (self.f64("lattice.K")?, self.f64("lattice.K_hz")?) {
            (Some(_), Some(_)) => {
                return Err(Error::Configuration("give lattice.K or lattice.K_hz, not both".into()))
            }
            (Some(k), None) => k * er,
            (None, Some(w)) => crate::params::HBAR * w,
            (None, None) => base.lattice.stark,
        };
        p.lattice.trap_frequency = match (self.f64("lattice.omega_t")?, self.f64("lattice.depth_ER")?) {
            (Some(_), Some(_)) => {
                return Err(Error::Configuration(
                    "give lattice.omega_t or lattice.depth_ER, not both".into(),
                ))
            }
            (Some(w), None) => w,
            (None, Some(d)) => trap_frequency_from_depth(d, p.lattice.impurity_mass_kg, p.lattice.wavelength_m),
            (None, None) => base.lattice.trap_frequency,
        };
        p.validate()?;
        Ok(p)
    }
}

fn rescale(v: f64, old: f64, new: f64) -> f64 {
    if old == new {
        v
    } else {
        v / old * new
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nested_and_dotted_keys_agree() {
        let a = Config::parse("[bec]\ng = 0.02\n[mc]\nsteps = 10").unwrap();
        let b = Config::parse("bec.g = 0.02\nmc.steps = 10").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_key_lists_valid_keys() {
        let err = Config::parse("bec.gg = 1").unwrap_err().to_string();
        assert!(err.contains("bec.gg") && err.contains("coupling.kappa"));
        let mut c = Config::default();
        assert!(c.apply_override("nope=1").is_err());
        assert!(c.apply_override("bec.g").is_err());
    }

    #[test]
    fn overrides_are_typed() {
        let mut c = Config::default();
        c.apply_override("mc.steps=1000").unwrap();
        c.apply_override("mc.potential_mode=full").unwrap();
        c.apply_override("coupling.kappa=1.5e-2").unwrap();
        assert_eq!(c.usize("mc.steps").unwrap(), Some(1000));
        assert_eq!(c.str("mc.potential_mode").unwrap(), Some("full"));
        assert_eq!(c.f64("coupling.kappa").unwrap(), Some(1.5e-2));
        assert!(c.bool("mc.steps").is_err());
    }

    #[test]
    fn reduced_keys_map_onto_preset() {
        let mut c = Config::default();
        c.apply_override("coupling.kappa=0.005").unwrap();
        c.apply_override("lattice.J=0.01").unwrap();
        let r = c.system_params(Preset::Fig4Transport).unwrap().reduced().unwrap();
        assert_relative_eq!(r.kappa, 0.005, max_relative = 1e-12);
        assert_relative_eq!(r.hopping, 0.01, max_relative = 1e-12);
        assert_relative_eq!(r.g, 1.1e-2, max_relative = 1e-12);
        let base = Config::default().system_params(Preset::Fig4Transport).unwrap();
        assert_eq!(base, Preset::Fig4Transport.params());
    }

    #[test]
    fn preset_key_selects_base() {
        let c = Config::parse("preset = \"fig5\"").unwrap();
        let p = c.system_params(Preset::Fig3Cluster1d).unwrap();
        assert_eq!(p.bec.dimension, Dimension::Two);
        assert!(Config::parse("preset = \"fig9\"").unwrap().system_params(Preset::Fig3Cluster1d).is_err());
    }
}
