// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

use bec_lattice_wasm::{dephasing_curves, potential_profile, ClusterSim};

#[test]
fn curves_start_at_one() {
    let rows = dephasing_curves(5.0, 10.0, 3, 5.0).ok().unwrap();
    assert_eq!(rows.len(), 15);
    assert_eq!(&rows[1..5], &[1.0; 4]);
    assert!(rows[11] < 1.0);
}

#[test]
fn potential_scales_with_coupling_squared() {
    let a = potential_profile("fig3", 4, 1.0).ok().unwrap();
    let b = potential_profile("fig3", 4, 2.0).ok().unwrap();
    assert_eq!(a.len(), 5);
    assert!((b[0] / a[0] - 4.0).abs() < 1e-9);
}

#[test]
fn lattice_gas_keeps_atoms() {
    let mut s = ClusterSim::new("fig5", 20, 0.1, 1.0, 3).ok().unwrap();
    let n = s.atoms();
    s.step(10_000).ok().unwrap();
    assert_eq!(s.atoms(), n);
    assert_eq!(s.occupation().iter().filter(|&&o| o == 1).count(), n);
    assert!(s.largest() <= n && s.clusters() >= 1);
}
