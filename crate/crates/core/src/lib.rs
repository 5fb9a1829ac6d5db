// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Impurity atoms in an optical lattice immersed in a Bose-Einstein
//! condensate.
//!
//! All physics routines work in reduced units: energies in the impurity
//! recoil energy E_R, lengths in the lattice wavelength λ, times in ħ/E_R and
//! temperatures as k_B T/E_R. [`params::SystemParams::reduced`] converts from
//! SI input.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bogoliubov;
pub mod clustering;
pub mod config;
pub mod dephasing;
pub mod error;
pub mod interaction;
pub mod params;
pub mod presets;
pub mod qme;
pub mod qubitgate;

pub use error::{Error, Result};
pub use params::{Reduced, SystemParams};
pub use presets::Preset;
