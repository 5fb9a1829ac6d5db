// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Hard-core lattice gas with the mediated attraction: Metropolis sampling,
//! cluster statistics and the analytic nearest-neighbour references.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::PotentialTable;

/// Periodic lattice geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    Ring(usize),
    Torus(usize),
}

impl Geometry {
    pub fn sites(self) -> usize {
        match self {
            Geometry::Ring(m) => m,
            Geometry::Torus(l) => l * l,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Geometry::Ring(_) => 1,
            Geometry::Torus(_) => 2,
        }
    }

    fn coords(self, s: usize) -> (i64, i64) {
        match self {
            Geometry::Ring(_) => (s as i64, 0),
            Geometry::Torus(l) => ((s % l) as i64, (s / l) as i64),
        }
    }

    /// Minimum-image displacement between two sites.
    pub fn displacement(self, a: usize, b: usize) -> (i64, i64) {
        let wrap = |d: i64, n: i64| {
            let d = d.rem_euclid(n);
            if d > n / 2 {
                d - n
            } else {
                d
            }
        };
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        match self {
            Geometry::Ring(m) => (wrap(bx - ax, m as i64), 0),
            Geometry::Torus(l) => (wrap(bx - ax, l as i64), wrap(by - ay, l as i64)),
        }
    }

    pub fn neighbours(self, s: usize) -> impl Iterator<Item = usize> {
        let out: [Option<usize>; 4] = match self {
            Geometry::Ring(m) => [Some((s + 1) % m), Some((s + m - 1) % m), None, None],
            Geometry::Torus(l) => {
                let (x, y) = (s % l, s / l);
                [
                    Some(y * l + (x + 1) % l),
                    Some(y * l + (x + l - 1) % l),
                    Some(((y + 1) % l) * l + x),
                    Some(((y + l - 1) % l) * l + x),
                ]
            }
        };
        out.into_iter().flatten()
    }
}

/// Occupation pattern with O(1) lists of occupied and empty sites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeConfiguration {
    pub geometry: Geometry,
    occupation: Vec<bool>,
    occupied: Vec<usize>,
    empty: Vec<usize>,
    /// Position of each site inside `occupied` or `empty`.
    slot: Vec<usize>,
}

impl LatticeConfiguration {
    pub fn from_occupation(geometry: Geometry, occupation: Vec<bool>) -> Result<Self> {
        if occupation.len() != geometry.sites() {
            return Err(Error::Configuration(format!(
                "occupation has {} sites, geometry needs {}",
                occupation.len(),
                geometry.sites()
            )));
        }
        if geometry.sites() < 2 {
            return Err(Error::invalid("lattice.sites", "need at least 2 sites"));
        }
        let mut occupied = Vec::new();
        let mut empty = Vec::new();
        let mut slot = vec![0; occupation.len()];
        for (s, &o) in occupation.iter().enumerate() {
            if o {
                slot[s] = occupied.len();
                occupied.push(s);
            } else {
                slot[s] = empty.len();
                empty.push(s);
            }
        }
        Ok(LatticeConfiguration {
            geometry,
            occupation,
            occupied,
            empty,
            slot,
        })
    }

    pub fn from_sites(geometry: Geometry, sites: &[usize]) -> Result<Self> {
        let mut occ = vec![false; geometry.sites()];
        for &s in sites {
            if s >= occ.len() || occ[s] {
                return Err(Error::Configuration(format!("invalid or repeated site {s}")));
            }
            occ[s] = true;
        }
        Self::from_occupation(geometry, occ)
    }

    /// N atoms placed uniformly at random.
    pub fn random<R: Rng + ?Sized>(geometry: Geometry, atoms: usize, rng: &mut R) -> Result<Self> {
        let m = geometry.sites();
        if atoms > m {
            return Err(Error::invalid("mc.atoms", format!("{atoms} atoms do not fit on {m} sites")));
        }
        let mut sites: Vec<usize> = (0..m).collect();
        for i in 0..atoms {
            let j = rng.random_range(i..m);
            sites.swap(i, j);
        }
        Self::from_sites(geometry, &sites[..atoms])
    }

    pub fn atoms(&self) -> usize {
        self.occupied.len()
    }

    pub fn sites(&self) -> usize {
        self.occupation.len()
    }

    pub fn is_occupied(&self, s: usize) -> bool {
        self.occupation[s]
    }

    pub fn occupied_sites(&self) -> &[usize] {
        &self.occupied
    }

    pub fn occupation(&self) -> &[bool] {
        &self.occupation
    }

    /// Moves the atom at `from` to the empty site `to`.
    pub fn relocate(&mut self, from: usize, to: usize) {
        debug_assert!(self.occupation[from] && !self.occupation[to]);
        let (i, j) = (self.slot[from], self.slot[to]);
        self.occupied[i] = to;
        self.empty[j] = from;
        self.slot[to] = i;
        self.slot[from] = j;
        self.occupation[from] = false;
        self.occupation[to] = true;
    }

    /// Plain-text 0/1 grid, one lattice row per line.
    pub fn snapshot(&self) -> String {
        let width = match self.geometry {
            Geometry::Ring(m) => m,
            Geometry::Torus(l) => l,
        };
        let mut s = String::with_capacity(self.sites() + self.sites() / width);
        for row in self.occupation.chunks(width) {
            s.extend(row.iter().map(|&o| if o { '1' } else { '0' }));
            s.push('\n');
        }
        s
    }

    /// Index of this configuration among all sorted site subsets, for
    /// small lattices.
    pub fn index(&self) -> u64 {
        self.occupation
            .iter()
            .enumerate()
            .fold(0u64, |acc, (s, &o)| if o { acc | (1 << s) } else { acc })
    }
}

/// How the sum over pairs in the Hamiltonian is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairCounting {
    /// Σ over ordered pairs (i, j): each bond contributes 2V.
    Ordered,
    /// Each unordered pair once: a bond contributes V.
    Unordered,
}

impl PairCounting {
    pub fn factor(self) -> f64 {
        match self {
            PairCounting::Ordered => 2.0,
            PairCounting::Unordered => 1.0,
        }
    }

    pub fn default_for(geometry: Geometry) -> Self {
        match geometry {
            Geometry::Ring(_) => PairCounting::Ordered,
            Geometry::Torus(_) => PairCounting::Unordered,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialMode {
    NearestNeighbour(f64),
    Full(PotentialTable),
}

/// Pair potential on a geometry with minimum image and truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Couplings {
    geometry: Geometry,
    nearest_only: Option<f64>,
    /// −c·V by flattened minimum-image displacement, for full mode.
    kernel: Vec<f64>,
    pub counting: PairCounting,
    pub onsite_u: f64,
}

impl Couplings {
    pub fn new(geometry: Geometry, mode: &PotentialMode, counting: PairCounting, onsite_u: f64) -> Result<Self> {
        let c = counting.factor();
        match mode {
            PotentialMode::NearestNeighbour(v) => Ok(Couplings {
                geometry,
                nearest_only: Some(-c * v.abs()),
                kernel: Vec::new(),
                counting,
                onsite_u,
            }),
            PotentialMode::Full(table) => {
                let m = geometry.sites();
                let reach = match geometry {
                    Geometry::Ring(m) => m / 2,
                    Geometry::Torus(l) => l / 2,
                };
                if table.delta_max() < reach.min(crate::interaction::DEFAULT_DELTA_MAX) {
                    return Err(Error::Configuration(format!(
                        "potential table reaches {} sites, lattice needs {}",
                        table.delta_max(),
                        reach.min(crate::interaction::DEFAULT_DELTA_MAX)
                    )));
                }
                let dmax = table.delta_max() as f64;
                let kernel = (0..m)
                    .map(|s| {
                        let (dx, dy) = geometry.displacement(0, s);
                        let r = ((dx * dx + dy * dy) as f64).sqrt();
                        if s == 0 || r > dmax {
                            0.0
                        } else {
                            -c * table.at_displacement(dx, dy)
                        }
                    })
                    .collect();
                Ok(Couplings {
                    geometry,
                    nearest_only: None,
                    kernel,
                    counting,
                    onsite_u,
                })
            }
        }
    }

    fn offset_index(&self, a: usize, b: usize) -> usize {
        match self.geometry {
            Geometry::Ring(m) => (b + m - a) % m,
            Geometry::Torus(l) => {
                let (ax, ay) = (a % l, a / l);
                let (bx, by) = (b % l, b / l);
                ((by + l - ay) % l) * l + (bx + l - ax) % l
            }
        }
    }

    /// Pair energy of atoms at `a` and `b` (a ≠ b).
    pub fn pair(&self, a: usize, b: usize) -> f64 {
        match self.nearest_only {
            Some(e) => {
                if self.geometry.neighbours(a).any(|n| n == b) {
                    e
                } else {
                    0.0
                }
            }
            None => self.kernel[self.offset_index(a, b)],
        }
    }

    /// Interaction of a particle at `site` with all atoms except `skip`.
    fn field(&self, cfg: &LatticeConfiguration, site: usize, skip: usize) -> f64 {
        match self.nearest_only {
            Some(e) => {
                let mut n = 0;
                for nb in self.geometry.neighbours(site) {
                    // A 2-site ring lists the same neighbour twice.
                    if nb != skip && cfg.occupation[nb] {
                        n += 1;
                    }
                }
                if let Geometry::Ring(2) = self.geometry {
                    n = n.min(1);
                }
                e * n as f64
            }
            None => cfg
                .occupied
                .iter()
                .filter(|&&j| j != skip && j != site)
                .map(|&j| self.kernel[self.offset_index(site, j)])
                .sum(),
        }
    }

    /// Energy change of moving the atom at `from` to the empty site `to`.
    pub fn delta_energy(&self, cfg: &LatticeConfiguration, from: usize, to: usize) -> f64 {
        self.field(cfg, to, from) - self.field(cfg, from, from)
    }
}

/// H = (U/2) Σ n(n−1) − Σ V n_i n_j; the on-site term vanishes for hard-core
/// occupations.
pub fn energy(cfg: &LatticeConfiguration, couplings: &Couplings) -> f64 {
    let occ = cfg.occupied_sites();
    let mut e = 0.0;
    for (i, &a) in occ.iter().enumerate() {
        for &b in &occ[i + 1..] {
            e += couplings.pair(a, b);
        }
    }
    e
}

/// Connected-component sizes under nearest-neighbour adjacency.
pub fn cluster_sizes(cfg: &LatticeConfiguration) -> Vec<usize> {
    let mut seen = vec![false; cfg.sites()];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for &s in cfg.occupied_sites() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        let mut size = 0;
        while let Some(x) = queue.pop_front() {
            size += 1;
            for nb in cfg.geometry.neighbours(x) {
                if cfg.is_occupied(nb) && !seen[nb] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

pub fn count_clusters(cfg: &LatticeConfiguration) -> usize {
    cluster_sizes(cfg).len()
}

pub fn largest_cluster(cfg: &LatticeConfiguration) -> usize {
    cluster_sizes(cfg).into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveSet {
    /// Random atom to a uniformly random empty site.
    Global,
    /// Random atom to a random nearest neighbour, rejected if occupied.
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRun {
    pub seed: u64,
    /// Proposed moves after equilibration.
    pub steps: u64,
    pub equilibration: u64,
    pub sample_interval: u64,
    /// k_B T in E_R.
    pub kt: f64,
    pub moves: MoveSet,
    /// Accept only moves with ΔE ≤ 0 (T → 0).
    pub quench: bool,
    pub audit_interval: u64,
}

impl McRun {
    pub fn new(seed: u64, kt: f64, equilibration: u64, steps: u64, sample_interval: u64) -> Self {
        McRun {
            seed,
            steps,
            equilibration,
            sample_interval,
            kt,
            moves: MoveSet::Global,
            quench: false,
            audit_interval: 100_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sample_interval == 0 {
            return Err(Error::invalid("mc.sample_interval", "must be >= 1"));
        }
        if !self.quench && !(self.kt > 0.0) {
            return Err(Error::Domain(format!(
                "Metropolis needs T > 0, got k_B T = {}; use quench mode for T -> 0",
                self.kt
            )));
        }
        Ok(())
    }
}

/// Observables of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McStats {
    pub seed: u64,
    pub atoms: usize,
    pub cluster_counts: Vec<u32>,
    pub largest_clusters: Vec<u32>,
    pub energies: Vec<f64>,
    pub accepted: u64,
    pub proposed: u64,
    pub final_energy: f64,
}

/// Mean, sample standard deviation and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Summary {
    pub fn of<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let mut n = 0usize;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for v in values {
            n += 1;
            let d = v - mean;
            mean += d / n as f64;
            m2 += d * (v - mean);
        }
        let std = if n > 1 { (m2 / (n - 1) as f64).sqrt() } else { 0.0 };
        Summary {
            mean,
            std,
            stderr: if n > 0 { std / (n as f64).sqrt() } else { 0.0 },
            samples: n,
        }
    }
}

impl McStats {
    pub fn acceptance(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    /// N_c/N over samples.
    pub fn cluster_fraction(&self) -> Summary {
        let n = self.atoms.max(1) as f64;
        Summary::of(self.cluster_counts.iter().map(|&c| c as f64 / n))
    }

    /// N_I/N over samples.
    pub fn island_fraction(&self) -> Summary {
        let n = self.atoms.max(1) as f64;
        Summary::of(self.largest_clusters.iter().map(|&c| c as f64 / n))
    }

    /// Pools the samples of several chains.
    pub fn pooled<'a, I: IntoIterator<Item = &'a McStats>>(runs: I) -> Option<McStats> {
        let mut it = runs.into_iter();
        let mut out = it.next()?.clone();
        for r in it {
            out.cluster_counts.extend_from_slice(&r.cluster_counts);
            out.largest_clusters.extend_from_slice(&r.largest_clusters);
            out.energies.extend_from_slice(&r.energies);
            out.accepted += r.accepted;
            out.proposed += r.proposed;
        }
        Some(out)
    }
}

/// Runs one Metropolis chain from `start`. `observe` sees every sampled
/// configuration.
pub fn metropolis_run_with<F>(
    start: LatticeConfiguration,
    couplings: &Couplings,
    run: &McRun,
    mut observe: F,
) -> Result<(McStats, LatticeConfiguration)>
where
    F: FnMut(&LatticeConfiguration),
{
    run.validate()?;
    let mut cfg = start;
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut e = energy(&cfg, couplings);
    let n = cfg.atoms();
    let holes = cfg.sites() - n;
    let mut stats = McStats {
        seed: run.seed,
        atoms: n,
        cluster_counts: Vec::new(),
        largest_clusters: Vec::new(),
        energies: Vec::new(),
        accepted: 0,
        proposed: 0,
        final_energy: e,
    };
    let total = run.equilibration + run.steps;
    for step in 1..=total {
        if n > 0 && holes > 0 {
            let from = cfg.occupied[rng.random_range(0..n)];
            let to = match run.moves {
                MoveSet::Global => Some(cfg.empty[rng.random_range(0..holes)]),
                MoveSet::Local => {
                    let nbs: Vec<usize> = cfg.geometry.neighbours(from).collect();
                    let t = nbs[rng.random_range(0..nbs.len())];
                    (!cfg.occupation[t]).then_some(t)
                }
            };
            // The uniform draw is taken for every proposal so the random
            // stream does not depend on the acceptance path.
            let u: f64 = rng.random();
            if let Some(to) = to {
                let de = couplings.delta_energy(&cfg, from, to);
                let accept = if run.quench {
                    de <= 0.0
                } else {
                    de <= 0.0 || u < (-de / run.kt).exp()
                };
                if accept {
                    cfg.relocate(from, to);
                    e += de;
                    if step > run.equilibration {
                        stats.accepted += 1;
                    }
                }
            }
        }
        if step > run.equilibration {
            stats.proposed += 1;
        }
        if run.audit_interval > 0 && step % run.audit_interval == 0 {
            let exact = energy(&cfg, couplings);
            if (exact - e).abs() > 1e-10 * exact.abs().max(1.0) {
                return Err(Error::State(format!(
                    "energy bookkeeping drifted at step {step}: tracked {e}, recomputed {exact}"
                )));
            }
            e = exact;
        }
        if step > run.equilibration && (step - run.equilibration).is_multiple_of(run.sample_interval) {
            let sizes = cluster_sizes(&cfg);
            stats.cluster_counts.push(sizes.len() as u32);
            stats
                .largest_clusters
                .push(sizes.iter().copied().max().unwrap_or(0) as u32);
            stats.energies.push(e);
            observe(&cfg);
        }
    }
    stats.final_energy = e;
    Ok((stats, cfg))
}

pub fn metropolis_run(start: LatticeConfiguration, couplings: &Couplings, run: &McRun) -> Result<McStats> {
    metropolis_run_with(start, couplings, run, |_| {}).map(|(s, _)| s)
}

/// Independent chains from random starts, one per seed, in seed order.
pub fn run_seeds(
    geometry: Geometry,
    atoms: usize,
    couplings: &Couplings,
    template: &McRun,
    seeds: &[u64],
) -> Result<Vec<McStats>> {
    let one = |&seed: &u64| -> Result<McStats> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let start = LatticeConfiguration::random(geometry, atoms, &mut rng)?;
        let run = McRun {
            seed,
            ..template.clone()
        };
        metropolis_run(start, couplings, &run)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        seeds.par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seeds.iter().map(one).collect()
    }
}

/// N_c/N for the nearest-neighbour ring in the thermodynamic limit with bond
/// energy 2|V₁₂|.
pub fn analytic_cluster_number_1d(m: usize, n: usize, v12: f64, kt: f64) -> Result<f64> {
    if !(kt > 0.0) {
        return Err(Error::Domain(format!("needs T > 0, got k_B T = {kt}")));
    }
    if n == 0 || n >= m {
        return Err(Error::Domain(format!("needs 0 < N < M, got N = {n}, M = {m}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    let s = 4.0 * (mf - nf) * nf / (mf * mf);
    let e = (2.0 * v12.abs() / kt).exp_m1();
    if e == 0.0 {
        return Ok((mf - nf) / mf);
    }
    Ok(mf / nf * s / (2.0 * ((1.0 + s * e).sqrt() + 1.0)))
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let lf = |x: usize| (1..=x).map(|i| (i as f64).ln()).sum::<f64>();
    lf(n) - lf(k) - lf(n - k)
}

/// Exact canonical ⟨N_c⟩/N on a ring of M sites with N atoms and bond energy
/// `bond` (the energy gained per adjacent pair).
pub fn exact_cluster_number_ring(m: usize, n: usize, bond: f64, kt: f64) -> Result<f64> {
    if n == 0 || n >= m {
        return Err(Error::Domain(format!("needs 0 < N < M, got N = {n}, M = {m}")));
    }
    if !(kt > 0.0) {
        return Err(Error::Domain(format!("needs T > 0, got k_B T = {kt}")));
    }
    let kmax = n.min(m - n);
    // Z_k = (M/k) C(N−1, k−1) C(M−N−1, k−1) e^{(N−k) bond/kT}.
    let logs: Vec<(f64, f64)> = (1..=kmax)
        .map(|k| {
            let l = (m as f64 / k as f64).ln()
                + ln_binomial(n - 1, k - 1)
                + ln_binomial(m - n - 1, k - 1)
                + (n - k) as f64 * bond / kt;
            (k as f64, l)
        })
        .collect();
    let top = logs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut kz) = (0.0, 0.0);
    for (k, l) in logs {
        let w = (l - top).exp();
        z += w;
        kz += k * w;
    }
    Ok(kz / z / n as f64)
}

/// N_I/N of the 2D island in the thermodynamic limit, zero above T_I.
pub fn analytic_island_size_2d(filling: f64, v12: f64, kt: f64) -> Result<f64> {
    if !(filling > 0.0 && filling <= 0.5) {
        return Err(Error::Domain(format!("filling must be in (0, 1/2], got {filling}")));
    }
    if !(kt > 0.0) {
        return Err(Error::Domain(format!("needs T > 0, got k_B T = {kt}")));
    }
    let js = v12.abs() / 4.0;
    let nr = 1.0 - 2.0 * filling;
    let sh = (2.0 * js / kt).sinh();
    let inner = 1.0 - sh.powi(-4);
    if !(inner > 0.0) {
        return Ok(0.0);
    }
    let n0 = inner.powf(0.125);
    if n0 <= nr {
        return Ok(0.0);
    }
    Ok((1.0 + n0) * (n0 - nr) / (2.0 * n0 * (1.0 - nr)))
}

/// k_B T_I = 2J_s/arsinh[(1 − N_r⁸)^{-1/4}] with J_s = |V₁₂|/4.
pub fn transition_temperature(v12: f64, nr: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&nr) {
        return Err(Error::Domain(format!("N_r must be in [0, 1), got {nr}")));
    }
    let js = v12.abs() / 4.0;
    Ok(2.0 * js / (1.0 - nr.powi(8)).powf(-0.25).asinh())
}
