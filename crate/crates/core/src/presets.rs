// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Parameter sets for the reference scenarios.
//!
//! Lattice wells are approximated as harmonic, ħω_t = 2√(V0 E_R), with the
//! oscillator length taken with the impurity mass.

use serde::{Deserialize, Serialize};

use crate::params::{
    recoil_energy, trap_frequency_from_depth, BecParams, CouplingParams, Dimension, LatticeParams,
    SystemParams, AMU, HBAR,
};

pub const MASS_RB87_U: f64 = 86.909_180_527;
pub const MASS_K41_U: f64 = 40.961_825_76;
pub const MASS_CS133_U: f64 = 132.905_451_961;
pub const MASS_NA23_U: f64 = 22.989_769_282;
pub const WAVELENGTH_M: f64 = 790e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// Two Cs atoms in a 1D Rb condensate.
    Fig2Dephasing,
    /// K atoms in a 1D Rb condensate, clustering.
    Fig3Cluster1d,
    /// Single K atom hopping in a 1D Rb condensate.
    Fig4Transport,
    /// K atoms in a 2D Rb condensate, island formation.
    Fig5Cluster2d,
    /// Single K atom in a tilted lattice.
    Fig6Bloch,
    /// Cs qubits in a 3D Na condensate.
    NaCsGate,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig2Dephasing,
        Preset::Fig3Cluster1d,
        Preset::Fig4Transport,
        Preset::Fig5Cluster2d,
        Preset::Fig6Bloch,
        Preset::NaCsGate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2Dephasing => "fig2",
            Preset::Fig3Cluster1d => "fig3",
            Preset::Fig4Transport => "fig4",
            Preset::Fig5Cluster2d => "fig5",
            Preset::Fig6Bloch => "fig6",
            Preset::NaCsGate => "nacs-gate",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn params(self) -> SystemParams {
        match self {
            Preset::Fig2Dephasing => fig2_dephasing_1d(),
            Preset::Fig3Cluster1d => fig3_cluster_1d(),
            Preset::Fig4Transport => fig4_transport_1d(),
            Preset::Fig5Cluster2d => fig5_cluster_2d(),
            Preset::Fig6Bloch => fig6_bloch_1d(),
            Preset::NaCsGate => nacs_gate_3d(),
        }
    }
}

struct Spec {
    boson_u: f64,
    impurity_u: f64,
    dim: Dimension,
    density: f64,
    g_reduced: f64,
    kappa_reduced: f64,
    depth_er: f64,
    t_nk: f64,
    j_er: f64,
    u_er: f64,
    stark_j: f64,
    sites: usize,
}

fn build(s: Spec) -> SystemParams {
    let m_l = s.impurity_u * AMU;
    let er = recoil_energy(m_l, WAVELENGTH_M);
    let len_d = WAVELENGTH_M.powi(s.dim.get() as i32);
    SystemParams {
        bec: BecParams {
            boson_mass_kg: s.boson_u * AMU,
            density: s.density,
            g: s.g_reduced * er * len_d,
            temperature_nk: s.t_nk,
            dimension: s.dim,
        },
        lattice: LatticeParams {
            wavelength_m: WAVELENGTH_M,
            impurity_mass_kg: m_l,
            hopping: s.j_er * er,
            onsite_u: s.u_er * er,
            trap_frequency: trap_frequency_from_depth(s.depth_er, m_l, WAVELENGTH_M),
            stark: s.stark_j,
            sites: s.sites,
        },
        coupling: CouplingParams::new(s.kappa_reduced * er * len_d),
    }
}

pub fn fig2_dephasing_1d() -> SystemParams {
    build(Spec {
        boson_u: MASS_RB87_U,
        impurity_u: MASS_CS133_U,
        dim: Dimension::One,
        density: 5e6,
        g_reduced: 4.5e-2,
        kappa_reduced: 3.5e-2,
        depth_er: 40.0,
        t_nk: 5.0,
        j_er: 0.0,
        u_er: 0.0,
        stark_j: 0.0,
        sites: 2,
    })
}

pub fn fig3_cluster_1d() -> SystemParams {
    build(Spec {
        boson_u: MASS_RB87_U,
        impurity_u: MASS_K41_U,
        dim: Dimension::One,
        density: 5e6,
        g_reduced: 1.1e-2,
        kappa_reduced: 2.5e-2,
        depth_er: 15.0,
        t_nk: 3.0,
        j_er: 0.0,
        u_er: 0.4,
        stark_j: 0.0,
        sites: 200,
    })
}

pub fn fig4_transport_1d() -> SystemParams {
    build(Spec {
        boson_u: MASS_RB87_U,
        impurity_u: MASS_K41_U,
        dim: Dimension::One,
        density: 5e6,
        g_reduced: 1.1e-2,
        kappa_reduced: 1.94e-2,
        depth_er: 9.0,
        t_nk: 100.0,
        j_er: 0.03,
        u_er: 0.0,
        stark_j: 0.0,
        sites: 121,
    })
}

pub fn fig5_cluster_2d() -> SystemParams {
    build(Spec {
        boson_u: MASS_RB87_U,
        impurity_u: MASS_K41_U,
        dim: Dimension::Two,
        density: 25e12,
        g_reduced: 5.1e-3,
        kappa_reduced: 1.87e-2,
        depth_er: 15.0,
        t_nk: 1.8,
        j_er: 0.0,
        u_er: 0.3,
        stark_j: 0.0,
        sites: 50,
    })
}

pub fn fig6_bloch_1d() -> SystemParams {
    build(Spec {
        boson_u: MASS_RB87_U,
        impurity_u: MASS_K41_U,
        dim: Dimension::One,
        density: 5e6,
        g_reduced: 1.1e-2,
        kappa_reduced: 1.6e-2,
        depth_er: 9.0,
        t_nk: 75.0,
        j_er: 0.03,
        u_er: 0.0,
        stark_j: HBAR * 1.5e3,
        sites: 41,
    })
}

pub fn nacs_gate_3d() -> SystemParams {
    build(Spec {
        boson_u: MASS_NA23_U,
        impurity_u: MASS_CS133_U,
        dim: Dimension::Three,
        density: 5e6f64.powi(3),
        g_reduced: 1.5e-2,
        kappa_reduced: 1.1e-2,
        depth_er: 40.0,
        t_nk: 0.0,
        j_er: 0.0,
        u_er: 0.0,
        stark_j: 0.0,
        sites: 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn presets_validate_and_roundtrip_names() {
        for p in Preset::ALL {
            p.params().validate().unwrap();
            assert_eq!(Preset::from_name(p.name()), Some(p));
        }
    }

    #[test]
    fn reduced_values_match_captions() {
        let r = fig5_cluster_2d().reduced().unwrap();
        assert_relative_eq!(r.g, 5.1e-3, max_relative = 1e-12);
        assert_relative_eq!(r.kappa, 1.87e-2, max_relative = 1e-12);
        assert_relative_eq!(r.density, 25e12 * 790e-9 * 790e-9, max_relative = 1e-12);
        let r = fig6_bloch_1d().reduced().unwrap();
        // K/ħ = 1.5 kHz in units of E_R/ħ.
        let u = fig6_bloch_1d().units();
        assert_relative_eq!(r.stark, 1.5e3 * u.time, max_relative = 1e-12);
        let r = nacs_gate_3d().reduced().unwrap();
        assert_relative_eq!(r.density, (5e6 * 790e-9f64).powi(3), max_relative = 1e-12);
        assert_eq!(r.kt, 0.0);
    }
}
