// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation transport of a single impurity on a 1D lattice.
//!
//! In the site basis the dissipator only damps coherences:
//! `dρ_{mm'}/dt = −i[H, ρ]_{mm'} − Φ̇(t, m − m') ρ_{mm'}` with
//! `Φ(t, Δ) = Σ' d_q (2N_q + 1)(1 − cos ω_q t)(2 − 2cos qΔa)/(ħω_q)²`
//! and `Φ̇ = 2[K_dis(t, 0) − K_dis(t, Δ)]`. H holds the hopping on a hard-wall
//! lattice and the Stark tilt; the uniform coherent shift is a global phase
//! and is dropped.
//!
//! The damping and the tilt are integrated exactly through an integrating
//! factor; the hopping is advanced with classical RK4 (Lawson scheme).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bogoliubov::{MomentumGrid, Phonons, QuadratureSpec};
use crate::dephasing::one_minus_separation;
use crate::error::{Error, Result};
use crate::params::Reduced;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn new(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() || rho.nrows() < 2 {
            return Err(Error::State("density matrix must be square with at least 2 sites".into()));
        }
        let s = DensityMatrix { rho };
        let tr = s.trace();
        if (tr - 1.0).abs() > 1e-6 {
            return Err(Error::State(format!("trace {tr} differs from 1")));
        }
        if s.hermiticity_defect() > 1e-10 {
            return Err(Error::State("matrix is not Hermitian".into()));
        }
        Ok(s)
    }

    /// One atom on site `j0`.
    pub fn localized(sites: usize, j0: usize) -> Result<Self> {
        if j0 >= sites {
            return Err(Error::invalid("transport.j0", format!("site {j0} outside 0..{sites}")));
        }
        let mut rho = CMatrix::zeros(sites, sites);
        rho[(j0, j0)] = Complex64::new(1.0, 0.0);
        Self::new(rho)
    }

    pub fn sites(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.sites()).map(|j| self.rho[(j, j)].re).collect()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.sites();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                d = d.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// Smallest eigenvalue; entries below 1e-30 are flushed first, which
    /// shifts eigenvalues by at most M·1e-30.
    pub fn min_eigenvalue(&self) -> f64 {
        self.rho
            .map(|z| if z.norm() < 1e-30 { Complex64::new(0.0, 0.0) } else { z })
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// K_dis(t, Δ) = Σ' d_q (2N_q + 1) sin(ω_q t)/ω_q cos(qΔa).
pub fn dissipative_kernel(model: &Reduced, grid: &MomentumGrid, delta: i64, t: f64) -> Result<f64> {
    check_time(t)?;
    let ph = Phonons::new(model);
    let r = delta.unsigned_abs() as f64 * model.spacing;
    grid.sum(|n| ph.dissipative_density(n.q) * (ph.energy(n.q) * t).sin() * grid.separation_factor(n, r))
}

/// K_coh(t, Δ) = Σ' d_q (1 − cos ω_q t)/ħω_q · 2cos(qΔa); tends to 2V(Δ).
pub fn coherent_kernel(model: &Reduced, grid: &MomentumGrid, delta: i64, t: f64) -> Result<f64> {
    check_time(t)?;
    let ph = Phonons::new(model);
    let r = delta.unsigned_abs() as f64 * model.spacing;
    grid.sum(|n| {
        let s = (0.5 * ph.energy(n.q) * t).sin();
        ph.potential_density(n.q) * 2.0 * s * s * 2.0 * grid.separation_factor(n, r)
    })
}

/// Φ(t, Δ), the integrated damping exponent of a coherence Δ sites wide.
pub fn dephasing_exponent(model: &Reduced, grid: &MomentumGrid, delta: i64, t: f64) -> Result<f64> {
    check_time(t)?;
    let ph = Phonons::new(model);
    let r = delta.unsigned_abs() as f64 * model.spacing;
    grid.sum(|n| {
        let s = (0.5 * ph.energy(n.q) * t).sin();
        ph.dephasing_density(n.q) * 2.0 * s * s * 2.0 * one_minus_separation(grid, n, r)
    })
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// Φ(t_k, Δ) on the uniform grid t_k = k·spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCache {
    pub spacing: f64,
    pub sites: usize,
    pub kappa: f64,
    /// Row-major, `times × sites`.
    phi: Vec<f64>,
}

impl KernelCache {
    pub fn zero(spacing: f64, sites: usize, times: usize) -> Self {
        KernelCache {
            spacing,
            sites,
            kappa: 0.0,
            phi: vec![0.0; times * sites],
        }
    }

    /// Tabulates Φ for `times` grid points and Δ = 0, …, sites − 1.
    pub fn build(model: &Reduced, grid: &MomentumGrid, sites: usize, spacing: f64, times: usize) -> Result<Self> {
        if model.kappa == 0.0 {
            return Ok(Self::zero(spacing, sites, times));
        }
        let ph = Phonons::new(model);
        let all: Vec<f64> = grid
            .nodes
            .iter()
            .map(|nd| nd.weight * ph.dephasing_density(nd.q))
            .collect();
        // Drop the weakest nodes while their summed weight stays below
        // PRUNE·Σ|b|; Φ then changes by at most 4·PRUNE·Σ|b|.
        const PRUNE: f64 = 1e-13;
        let total: f64 = all.iter().map(|b| b.abs()).sum();
        let mut order: Vec<usize> = (0..all.len()).collect();
        order.sort_by(|&i, &j| all[i].abs().total_cmp(&all[j].abs()));
        let mut dropped = 0.0;
        let mut keep = vec![true; all.len()];
        for &i in &order {
            dropped += all[i].abs();
            if dropped > PRUNE * total {
                break;
            }
            keep[i] = false;
        }
        let nodes: Vec<_> = grid.nodes.iter().zip(&keep).filter(|(_, &k)| k).map(|(nd, _)| nd).collect();
        let b: Vec<f64> = all.iter().zip(&keep).filter(|(_, &k)| k).map(|(b, _)| *b).collect();
        let n = nodes.len();
        let rot: Vec<Complex64> = nodes
            .iter()
            .map(|nd| Complex64::cis(ph.energy(nd.q) * spacing))
            .collect();
        let sep = DMatrix::from_fn(n, sites, |i, d| {
            2.0 * one_minus_separation(grid, nodes[i], d as f64 * model.spacing)
        });
        let mut phi = vec![0.0; times * sites];
        let mut z = vec![Complex64::new(1.0, 0.0); n];
        const CHUNK: usize = 64;
        let mut k0 = 0;
        while k0 < times {
            let rows = CHUNK.min(times - k0);
            let mut s = DMatrix::<f64>::zeros(rows, n);
            for r in 0..rows {
                let k = k0 + r;
                if k % 256 == 0 {
                    // Exact phases now and then keep the recurrence from drifting.
                    for (i, nd) in nodes.iter().enumerate() {
                        z[i] = Complex64::cis(ph.energy(nd.q) * spacing * k as f64);
                    }
                }
                for i in 0..n {
                    s[(r, i)] = b[i] * (1.0 - z[i].re);
                    z[i] *= rot[i];
                }
            }
            let block = &s * &sep;
            for r in 0..rows {
                for d in 0..sites {
                    phi[(k0 + r) * sites + d] = block[(r, d)];
                }
            }
            k0 += rows;
        }
        Ok(KernelCache {
            spacing,
            sites,
            kappa: model.kappa,
            phi,
        })
    }

    pub fn times(&self) -> usize {
        self.phi.len() / self.sites
    }

    pub fn phi(&self, k: usize, delta: usize) -> f64 {
        self.phi[k * self.sites + delta]
    }

    /// Same kernels for another coupling; Φ scales with κ².
    pub fn rescaled(&self, kappa: f64) -> Result<Self> {
        if self.kappa == 0.0 {
            if kappa == 0.0 {
                return Ok(self.clone());
            }
            return Err(Error::Configuration("cannot rescale a zero-coupling cache".into()));
        }
        let f = (kappa / self.kappa).powi(2);
        Ok(KernelCache {
            spacing: self.spacing,
            sites: self.sites,
            kappa,
            phi: self.phi.iter().map(|p| p * f).collect(),
        })
    }

    /// Number of (t, Δ) cells where Φ decreases, i.e. a transiently negative
    /// damping rate.
    pub fn negative_rate_cells(&self) -> usize {
        let scale = self.phi.iter().fold(0.0, |a: f64, p| a.max(p.abs()));
        let mut count = 0;
        for k in 1..self.times() {
            for d in 1..self.sites {
                if self.phi(k, d) < self.phi(k - 1, d) - 1e-12 * scale {
                    count += 1;
                }
            }
        }
        count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Fixed step; the default rule is used when `None`.
    pub dt: Option<f64>,
    /// Store populations every this many steps (0: only the end).
    pub record_every: usize,
    pub positivity_every: usize,
    pub trace_tolerance: f64,
    /// Abort when the smallest eigenvalue falls below minus this value;
    /// `None` only records it.
    pub positivity_abort: Option<f64>,
    pub max_halvings: u32,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            dt: None,
            record_every: 0,
            positivity_every: 100,
            trace_tolerance: 1e-6,
            positivity_abort: Some(1e-6),
            max_halvings: 4,
        }
    }
}

/// dt = min(0.005 ħ/J, 0.005 ħ/|K|, 0.01 ξ/c).
pub fn default_step(model: &Reduced) -> f64 {
    let mut dt = 0.01 * model.healing_length() / model.sound_speed();
    if model.hopping > 0.0 {
        dt = dt.min(0.005 / model.hopping);
    }
    if model.stark != 0.0 {
        dt = dt.min(0.005 / model.stark.abs());
    }
    dt
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub dt: f64,
    pub steps: usize,
    pub max_trace_drift: f64,
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub negative_rate_cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
    pub state: DensityMatrix,
    pub diagnostics: Diagnostics,
}

/// Element-wise propagator of damping and tilt between two cached times,
/// indexed by m − m' + (sites − 1).
fn factor(model: &Reduced, cache: &KernelCache, from: usize, to: usize) -> Vec<Complex64> {
    let m = cache.sites;
    let dt = (to - from) as f64 * cache.spacing;
    (0..2 * m - 1)
        .map(|i| {
            let d = i as i64 - (m as i64 - 1);
            let a = d.unsigned_abs() as usize;
            let damp = cache.phi(to, a) - cache.phi(from, a);
            Complex64::from_polar((-damp).exp(), -model.stark * d as f64 * dt)
        })
        .collect()
}

fn scale(rho: &CMatrix, f: &[Complex64]) -> CMatrix {
    let m = rho.nrows();
    CMatrix::from_fn(m, m, |i, j| rho[(i, j)] * f[i + m - 1 - j])
}

/// −i[H_hop, ρ] with H_hop = −J Σ (|j⟩⟨j+1| + h.c.) on a hard wall.
fn hopping_rhs(j: f64, rho: &CMatrix) -> CMatrix {
    let m = rho.nrows();
    let i_j = Complex64::new(0.0, j);
    CMatrix::from_fn(m, m, |a, b| {
        let mut s = Complex64::new(0.0, 0.0);
        if a + 1 < m {
            s += rho[(a + 1, b)];
        }
        if a > 0 {
            s += rho[(a - 1, b)];
        }
        if b + 1 < m {
            s -= rho[(a, b + 1)];
        }
        if b > 0 {
            s -= rho[(a, b - 1)];
        }
        // −i(Hρ − ρH) with H = −J·adjacency.
        i_j * s
    })
}

/// Integrates with a precomputed cache whose spacing is dt/2.
pub fn evolve_cached(
    model: &Reduced,
    rho0: &DensityMatrix,
    cache: &KernelCache,
    steps: usize,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    let m = rho0.sites();
    if cache.sites != m {
        return Err(Error::Configuration(format!(
            "kernel cache covers {} sites, state has {m}",
            cache.sites
        )));
    }
    if cache.times() < 2 * steps + 1 {
        return Err(Error::Configuration("kernel cache is shorter than the run".into()));
    }
    let h = 2.0 * cache.spacing;
    let mut rho = rho0.rho.clone();
    let mut diag = Diagnostics {
        dt: h,
        steps,
        max_trace_drift: 0.0,
        max_hermiticity_defect: 0.0,
        min_eigenvalue: f64::INFINITY,
        negative_rate_cells: cache.negative_rate_cells(),
    };
    let mut times = vec![0.0];
    let mut pops = vec![rho0.populations()];
    let tr0 = rho0.trace();
    for n in 0..steps {
        let (k0, kh, k1) = (2 * n, 2 * n + 1, 2 * n + 2);
        let e_half = factor(model, cache, k0, kh);
        let e_full = factor(model, cache, k0, k1);
        let e_late = factor(model, cache, kh, k1);
        let k1v = hopping_rhs(model.hopping, &rho);
        let a = scale(&(&rho + &k1v * Complex64::from(0.5 * h)), &e_half);
        let k2v = hopping_rhs(model.hopping, &a);
        let rho_half = scale(&rho, &e_half);
        let b = &rho_half + &k2v * Complex64::from(0.5 * h);
        let k3v = hopping_rhs(model.hopping, &b);
        let rho_full = scale(&rho, &e_full);
        let c = &rho_full + scale(&k3v, &e_late) * Complex64::from(h);
        let k4v = hopping_rhs(model.hopping, &c);
        let incr = scale(&k1v, &e_full) + scale(&(&k2v + &k3v), &e_late) * Complex64::from(2.0) + k4v;
        rho = rho_full + incr * Complex64::from(h / 6.0);

        let state = DensityMatrix { rho: rho.clone() };
        let drift = (state.trace() - tr0).abs();
        diag.max_trace_drift = diag.max_trace_drift.max(drift);
        if drift > opts.trace_tolerance {
            return Err(Error::Integration {
                time: (n + 1) as f64 * h,
                reason: format!("trace drift {drift:e} exceeds {:e}", opts.trace_tolerance),
            });
        }
        diag.max_hermiticity_defect = diag.max_hermiticity_defect.max(state.hermiticity_defect());
        let step = n + 1;
        if opts.positivity_every > 0 && (step % opts.positivity_every == 0 || step == steps) {
            let ev = state.min_eigenvalue();
            diag.min_eigenvalue = diag.min_eigenvalue.min(ev);
            if let Some(tol) = opts.positivity_abort {
                if ev < -tol {
                    return Err(Error::Integration {
                        time: step as f64 * h,
                        reason: format!("smallest eigenvalue {ev:e} below -{tol:e}"),
                    });
                }
            }
        }
        if opts.record_every > 0 && (step % opts.record_every == 0 || step == steps) {
            times.push(step as f64 * h);
            pops.push(state.populations());
        }
    }
    let state = DensityMatrix { rho };
    if opts.record_every == 0 {
        times.push(steps as f64 * h);
        pops.push(state.populations());
    }
    Ok(Trajectory {
        times,
        populations: pops,
        state,
        diagnostics: diag,
    })
}

/// Number of steps and step size for a run to `t_end`.
pub fn plan(model: &Reduced, t_end: f64, dt: Option<f64>) -> Result<(usize, f64)> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Domain(format!("t_end must be finite and > 0, got {t_end}")));
    }
    let dt0 = dt.unwrap_or_else(|| default_step(model));
    if !(dt0 > 0.0) {
        return Err(Error::invalid("transport.dt", "must be > 0"));
    }
    let steps = (t_end / dt0).ceil().max(1.0) as usize;
    Ok((steps, t_end / steps as f64))
}

/// Grid that resolves Φ up to `t_end` over the whole lattice.
pub fn kernel_grid(model: &Reduced, sites: usize, t_end: f64) -> Result<MomentumGrid> {
    if model.dim != 1 {
        return Err(Error::UnsupportedDimension(model.dim));
    }
    let spec = QuadratureSpec::resolving(t_end, sites as f64 * model.spacing);
    MomentumGrid::thermodynamic(model, &spec)
}

/// Integrates from ρ₀ to `t_end`, halving the step while the trace drifts.
pub fn evolve(model: &Reduced, rho0: &DensityMatrix, t_end: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    let m = rho0.sites();
    let grid = if model.kappa != 0.0 {
        Some(kernel_grid(model, m, t_end)?)
    } else {
        None
    };
    let (mut steps, mut dt) = plan(model, t_end, opts.dt)?;
    let mut last = None;
    for _ in 0..=opts.max_halvings {
        let cache = match &grid {
            Some(g) => KernelCache::build(model, g, m, 0.5 * dt, 2 * steps + 1)?,
            None => KernelCache::zero(0.5 * dt, m, 2 * steps + 1),
        };
        let record = if opts.record_every > 0 {
            opts.record_every * (dt_ratio(opts.dt.unwrap_or(dt), dt))
        } else {
            0
        };
        let o = EvolveOptions {
            record_every: record,
            ..*opts
        };
        match evolve_cached(model, rho0, &cache, steps, &o) {
            Ok(t) => return Ok(t),
            Err(e @ Error::Integration { .. }) if e.to_string().contains("trace drift") => {
                last = Some(e);
                steps *= 2;
                dt *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn dt_ratio(original: f64, current: f64) -> usize {
    (original / current).round().max(1.0) as usize
}

/// Transport statistics around the initial site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportStats {
    /// √(Σ p_j (j − j₀)²) in sites.
    pub sigma_d: f64,
    /// Σ p_j (j − j₀)².
    pub second_moment: f64,
    /// Mean population over the sites of I = [j₀ − σ_d, j₀ + σ_d].
    pub p_bar: f64,
    /// Population variance over the sites of I.
    pub p_d: f64,
    pub interval: (i64, i64),
}

/// σ_d, p̄ and p_d; `None` when σ_d vanishes.
pub fn transport_stats(populations: &[f64], j0: usize) -> Option<TransportStats> {
    let j0f = j0 as f64;
    let second: f64 = populations
        .iter()
        .enumerate()
        .map(|(j, p)| p * (j as f64 - j0f).powi(2))
        .sum();
    let sigma = second.sqrt();
    if !(sigma > 1e-12) {
        return None;
    }
    let lo = (j0f - sigma).ceil() as i64;
    let hi = (j0f + sigma).floor() as i64;
    let inside: Vec<f64> = (lo..=hi)
        .filter(|&j| j >= 0 && (j as usize) < populations.len())
        .map(|j| populations[j as usize])
        .collect();
    let count = inside.len().max(1) as f64;
    let p_bar = inside.iter().sum::<f64>() / count;
    let p_d = inside.iter().map(|p| (p - p_bar).powi(2)).sum::<f64>() / count;
    Some(TransportStats {
        sigma_d: sigma,
        second_moment: second,
        p_bar,
        p_d,
        interval: (lo, hi),
    })
}

/// ⟨j⟩ = Σ j p_j.
pub fn mean_position(populations: &[f64]) -> f64 {
    populations.iter().enumerate().map(|(j, p)| j as f64 * p).sum()
}

/// Sites needed so wavefronts starting at the centre stay inside up to
/// `t_end`, with a margin.
pub fn sites_for_no_reflection(hopping: f64, t_end: f64, margin: usize) -> usize {
    let reach = (4.0 * hopping * t_end).ceil() as usize;
    2 * (reach + margin) + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;

    #[test]
    fn stats_edge_cases() {
        let mut p = vec![0.0; 11];
        p[5] = 1.0;
        assert!(transport_stats(&p, 5).is_none());
        let flat = vec![1.0 / 11.0; 11];
        let s = transport_stats(&flat, 5).unwrap();
        assert!(s.p_d < 1e-30);
        assert_relative_eq!(mean_position(&flat), 5.0, max_relative = 1e-14);
    }

    #[test]
    fn kernels_vanish_at_zero_time_and_coupling() {
        let m = presets::fig4_transport_1d().reduced().unwrap();
        let g = kernel_grid(&m, 11, 50.0).unwrap();
        assert_eq!(dissipative_kernel(&m, &g, 0, 0.0).unwrap(), 0.0);
        assert_eq!(coherent_kernel(&m, &g, 2, 0.0).unwrap(), 0.0);
        let off = m.with_kappa(0.0);
        assert_eq!(dissipative_kernel(&off, &g, 1, 10.0).unwrap(), 0.0);
        assert!(coherent_kernel(&m, &g, 0, 7.0).unwrap() > 0.0);
    }

    #[test]
    fn cache_matches_direct_exponent() {
        let m = presets::fig4_transport_1d().reduced().unwrap();
        let g = kernel_grid(&m, 9, 40.0).unwrap();
        let cache = KernelCache::build(&m, &g, 9, 0.25, 161).unwrap();
        let ph = Phonons::new(&m);
        let scale: f64 = g.nodes.iter().map(|n| (n.weight * ph.dephasing_density(n.q)).abs()).sum();
        for &(k, d) in &[(0usize, 3usize), (17, 1), (160, 8), (101, 4)] {
            let direct = dephasing_exponent(&m, &g, d as i64, k as f64 * 0.25).unwrap();
            let tol = 4e-13 * scale + 1e-12 * direct.abs();
            assert!((cache.phi(k, d) - direct).abs() <= tol, "{k} {d}: {} vs {direct}", cache.phi(k, d));
        }
        let half = cache.rescaled(0.5 * m.kappa).unwrap();
        assert_relative_eq!(half.phi(50, 3), 0.25 * cache.phi(50, 3), max_relative = 1e-14);
    }

    #[test]
    fn dephasing_rate_is_twice_kernel_difference() {
        let m = presets::fig4_transport_1d().reduced().unwrap();
        let g = kernel_grid(&m, 5, 30.0).unwrap();
        let (t, h) = (12.0, 1e-3);
        let rate = (dephasing_exponent(&m, &g, 3, t + h).unwrap()
            - dephasing_exponent(&m, &g, 3, t - h).unwrap())
            / (2.0 * h);
        let k = 2.0
            * (dissipative_kernel(&m, &g, 0, t).unwrap() - dissipative_kernel(&m, &g, 3, t).unwrap());
        assert_relative_eq!(rate, k, max_relative = 1e-5);
    }

    #[test]
    fn populations_untouched_without_hopping() {
        let mut m = presets::fig4_transport_1d().reduced().unwrap();
        m.hopping = 0.0;
        let mut rho = CMatrix::zeros(4, 4);
        for (i, j, v) in [(0, 0, 0.3), (1, 1, 0.2), (2, 2, 0.4), (3, 3, 0.1), (0, 2, 0.2), (2, 0, 0.2)] {
            rho[(i, j)] = Complex64::new(v, 0.0);
        }
        let rho0 = DensityMatrix::new(rho).unwrap();
        let traj = evolve(&m, &rho0, 20.0, &EvolveOptions::default()).unwrap();
        assert_eq!(traj.state.populations(), rho0.populations());
    }

    #[test]
    fn no_reflection_rule() {
        assert_eq!(sites_for_no_reflection(0.03, 402.0, 12), 2 * (49 + 12) + 1);
    }
}
