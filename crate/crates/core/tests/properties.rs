// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

use bec_lattice::bogoliubov::{MomentumGrid, Phonons, QuadratureSpec};
use bec_lattice::clustering::{
    self, Couplings, Geometry, LatticeConfiguration, McRun, PairCounting, PotentialMode,
};
use bec_lattice::dephasing::{self, GammaTriple, TimeMode};
use bec_lattice::interaction::PotentialTable;
use bec_lattice::params::{self, occupation};
use bec_lattice::qme::{self, CMatrix, DensityMatrix, EvolveOptions, KernelCache};
use bec_lattice::qubitgate::{self, Mat4, TwoQubitState};
use bec_lattice::{Preset, Reduced};
use nalgebra::{Complex, Vector4};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fig2() -> Reduced {
    Preset::Fig2Dephasing.params().reduced().unwrap()
}

fn triple() -> impl Strategy<Value = GammaTriple> {
    (1e-3..=1.0f64, 1e-3..=1.0f64, 1e-3..=1.0f64).prop_map(|(a, b, c)| GammaTriple::new(a, b, c).unwrap())
}

fn state(seed: u64) -> TwoQubitState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rho = Mat4::zeros();
    for w in [0.6, 0.3, 0.1] {
        let psi: Vector4<Complex<f64>> = qubitgate::haar_state(&mut rng);
        rho += psi * psi.adjoint() * Complex::from(w);
    }
    TwoQubitState::new(rho).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derive_is_pure(scale in 0.5..2.0f64) {
        let mut p = Preset::Fig3Cluster1d.params();
        p.bec.density *= scale;
        let a = params::derive(&p.bec, &p.lattice).unwrap();
        let b = params::derive(&p.bec, &p.lattice).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn healing_length_scales_as_inverse_sqrt_g(f in 0.25..4.0f64) {
        let p = Preset::Fig3Cluster1d.params();
        let mut q = p;
        q.bec.g *= f;
        let a = params::derive(&p.bec, &p.lattice).unwrap().healing_length;
        let b = params::derive(&q.bec, &q.lattice).unwrap().healing_length;
        prop_assert!((a / b - f.sqrt()).abs() < 1e-12 * f.sqrt());
    }

    #[test]
    fn occupation_monotone(e in 1e-4..10.0f64, kt in 1e-4..10.0f64, f in 1.01..3.0f64) {
        let n = occupation(e, kt).unwrap();
        prop_assert!(n >= 0.0);
        prop_assert!(occupation(e, kt * f).unwrap() >= n);
        prop_assert!(occupation(e * f, kt).unwrap() <= n);
    }

    #[test]
    fn dispersion_increasing(q in 1e-3..50.0f64, f in 1.001..2.0f64) {
        let ph = Phonons::new(&fig2());
        let (e1, w1) = ph.dispersion(q).unwrap();
        let (_, w2) = ph.dispersion(q * f).unwrap();
        prop_assert!(w2 > w1);
        prop_assert!(w1 >= e1);
    }

    #[test]
    fn channel_preserves_trace_and_hermiticity(g in triple(), seed in any::<u64>()) {
        let s = state(seed);
        let out = qubitgate::apply_dephasing(&s, &g).unwrap();
        let m = out.matrix();
        prop_assert!((m.trace() - s.matrix().trace()).norm() < 1e-14);
        prop_assert!(qubitgate::max_norm(&(m - m.adjoint())) < 1e-14);
        for a in 0..4 {
            prop_assert_eq!(m[(a, a)], s.matrix()[(a, a)]);
        }
    }

    #[test]
    fn kraus_matches_elementwise(g in triple(), seed in any::<u64>()) {
        if let Ok(k) = qubitgate::kraus_set(&g) {
            let s = state(seed);
            let a = k.apply(s.matrix());
            let b = qubitgate::apply_dephasing(&s, &g).unwrap();
            prop_assert!(qubitgate::max_norm(&(a - b.matrix())) < 1e-12);
            prop_assert!(k.completeness_defect() < 1e-12);
        }
    }

    #[test]
    fn channel_commutes_with_controlled_phase(g in triple(), phi in 0.0..6.3f64, seed in any::<u64>()) {
        let s = state(seed);
        let u = qubitgate::controlled_phase(phi);
        let rotated = TwoQubitState::new(u * s.matrix() * u.adjoint()).unwrap();
        let a = qubitgate::apply_dephasing(&rotated, &g).unwrap();
        let d = qubitgate::apply_dephasing(&s, &g).unwrap();
        let b = u * d.matrix() * u.adjoint();
        prop_assert!(qubitgate::max_norm(&(a.matrix() - b)) < 1e-14);
    }

    #[test]
    fn fidelity_monotone(g in triple(), which in 0usize..3, bump in 0.0..0.5f64) {
        let mut v = [g.gamma0, g.gamma_minus, g.gamma_plus];
        v[which] = (v[which] + bump).min(1.0);
        let h = GammaTriple::new(v[0], v[1], v[2]).unwrap();
        prop_assert!(qubitgate::average_fidelity(&h) >= qubitgate::average_fidelity(&g));
    }

    #[test]
    fn mc_conserves_atoms_and_energy(seed in any::<u64>(), atoms in 1usize..30, kt in 0.002..0.05f64) {
        let geom = Geometry::Torus(8);
        let table = PotentialTable::from_values(2, vec![0.03, 0.01, 0.004, 0.001, 0.0005], 0);
        let c = Couplings::new(geom, &PotentialMode::Full(table), PairCounting::default_for(geom), 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = LatticeConfiguration::random(geom, atoms, &mut rng).unwrap();
        let mut run = McRun::new(seed, kt, 0, 2_000, 50);
        run.audit_interval = 100;
        let mut ok = true;
        let (_, end) = clustering::metropolis_run_with(start, &c, &run, |cfg| {
            let sizes = clustering::cluster_sizes(cfg);
            ok &= cfg.atoms() == atoms
                && sizes.iter().sum::<usize>() == atoms
                && clustering::largest_cluster(cfg) <= atoms
                && sizes.len() == clustering::count_clusters(cfg);
        })
        .unwrap();
        prop_assert!(ok);
        prop_assert_eq!(end.atoms(), atoms);
        let brute: f64 = end
            .occupied_sites()
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| end.occupied_sites()[i + 1..].iter().map(move |&b| (a, b)))
            .map(|(a, b)| c.pair(a, b))
            .sum();
        prop_assert!((clustering::energy(&end, &c) - brute).abs() < 1e-12);
    }

    #[test]
    fn mc_is_reproducible(seed in any::<u64>()) {
        let geom = Geometry::Ring(40);
        let c = Couplings::new(geom, &PotentialMode::NearestNeighbour(0.01), PairCounting::default_for(geom), 0.0).unwrap();
        let run = McRun::new(seed, 0.01, 1_000, 5_000, 100);
        let a = clustering::run_seeds(geom, 8, &c, &run, &[seed, seed ^ 1]).unwrap();
        let b = clustering::run_seeds(geom, 8, &c, &run, &[seed, seed ^ 1]).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn product_identity_on_shared_grid(t in 0.0..4000.0f64, kt in 0.0..0.05f64, d in 0.0..20.0f64) {
        let m = fig2().with_kt(kt);
        let r = d * m.spacing;
        let grid = MomentumGrid::thermodynamic(&m, &QuadratureSpec::resolving(t, r)).unwrap();
        let g = dephasing::gamma_triple(&m, &grid, r, TimeMode::At(t)).unwrap().triple;
        for v in [g.gamma0, g.gamma_minus, g.gamma_plus] {
            prop_assert!(v > 0.0 && v <= 1.0);
        }
        let rel = (g.gamma_plus * g.gamma_minus - g.gamma0.powi(4)).abs() / g.gamma0.powi(4);
        prop_assert!(rel < 1e-10);
    }

    #[test]
    fn gamma_non_increasing_in_kappa(t in 10.0..4000.0f64, f in 1.0..2.0f64) {
        let m = fig2();
        let r = 5.0 * m.spacing;
        let grid = MomentumGrid::thermodynamic(&m, &QuadratureSpec::resolving(t, r)).unwrap();
        let a = dephasing::gamma_triple(&m, &grid, r, TimeMode::At(t)).unwrap().triple;
        let strong = m.with_kappa(m.kappa * f);
        let b = dephasing::gamma_triple(&strong, &grid, r, TimeMode::At(t)).unwrap().triple;
        prop_assert!(b.gamma0 <= a.gamma0 && b.gamma_minus <= a.gamma_minus && b.gamma_plus <= a.gamma_plus);
    }

    #[test]
    fn qme_without_hopping_keeps_populations(seed in any::<u64>()) {
        let p = Preset::Fig4Transport.params();
        let mut m = p.reduced().unwrap();
        m.hopping = 0.0;
        let sites = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: Vec<Complex<f64>> = (0..sites)
            .map(|_| Complex::new(rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng),
                                  rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)))
            .collect();
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let rho = CMatrix::from_fn(sites, sites, |a, b| psi[a] * psi[b].conj() / norm);
        let rho0 = DensityMatrix::new(rho).unwrap();
        let t_end = 100.0;
        let grid = qme::kernel_grid(&m, sites, t_end).unwrap();
        let (steps, dt) = qme::plan(&m, t_end, None).unwrap();
        let cache = KernelCache::build(&m, &grid, sites, 0.5 * dt, 2 * steps + 1).unwrap();
        let opts = EvolveOptions { positivity_abort: None, ..EvolveOptions::default() };
        let tr = qme::evolve_cached(&m, &rho0, &cache, steps, &opts).unwrap();
        for (a, b) in tr.state.populations().iter().zip(rho0.populations()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
        prop_assert!(tr.state.hermiticity_defect() < 1e-12);
    }
}

#[test]
fn potential_tables_decrease_with_distance() {
    for preset in [Preset::Fig3Cluster1d, Preset::Fig5Cluster2d] {
        let m = preset.params().reduced().unwrap();
        let t = PotentialTable::compute(&m, 20).unwrap();
        // Beyond ~1e-15 V(0) the values sit at the quadrature rounding floor.
        let floor = 1e-15 * t.values[0];
        let resolved: Vec<f64> = t.values.iter().copied().take_while(|v| *v > floor).collect();
        assert!(resolved.len() >= 12, "{preset:?} {:?}", t.values);
        assert!(resolved.windows(2).all(|w| w[1] < w[0]), "{preset:?}");
        for d in 1..20 {
            assert_eq!(t.get(d), t.get(-d));
        }
    }
}

#[test]
fn separated_pairs_meet_at_large_distance() {
    let m = fig2();
    let r = 100.0 * m.spacing;
    let t = 10.0 * 1e-3 / Preset::Fig2Dephasing.params().units().time;
    let grid = MomentumGrid::thermodynamic(&m, &QuadratureSpec::resolving(t, r)).unwrap();
    let g = dephasing::gamma_triple(&m, &grid, r, TimeMode::At(t)).unwrap().triple;
    assert!((g.gamma_plus - g.gamma_minus).abs() < 0.02, "{g:?}");
}
