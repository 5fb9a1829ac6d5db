// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use bec_lattice::bogoliubov::{MomentumGrid, QuadratureSpec};
use bec_lattice::clustering::{
    self, Couplings, Geometry, McRun, McStats, MoveSet, PairCounting, PotentialMode, Summary,
};
use bec_lattice::config::Config;
use bec_lattice::dephasing::{self, GammaTriple, TimeMode};
use bec_lattice::interaction::{self, PotentialTable};
use bec_lattice::params::SystemParams;
use bec_lattice::qme::{self, DensityMatrix, EvolveOptions, KernelCache};
use bec_lattice::qubitgate::{self, HaarMoments};
use bec_lattice::{Preset, Reduced};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::output::{fmt, linspace, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Potential,
    DephasingScan,
    GateFidelity,
    ClusterMc,
    Transport,
    Bloch,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Potential => "potential",
            Command::DephasingScan => "dephasing-scan",
            Command::GateFidelity => "gate-fidelity",
            Command::ClusterMc => "cluster-mc",
            Command::Transport => "transport",
            Command::Bloch => "bloch",
        }
    }

    pub fn default_preset(self) -> Preset {
        match self {
            Command::Potential => Preset::Fig3Cluster1d,
            Command::DephasingScan => Preset::Fig2Dephasing,
            Command::GateFidelity => Preset::NaCsGate,
            Command::ClusterMc => Preset::Fig3Cluster1d,
            Command::Transport => Preset::Fig4Transport,
            Command::Bloch => Preset::Fig6Bloch,
        }
    }
}

pub struct Context<'a> {
    pub config: &'a Config,
    pub out: &'a Path,
    pub seed: u64,
}

pub struct Outcome {
    pub params: SystemParams,
    pub grid: Value,
    pub seeds: Vec<u64>,
    pub outputs: Vec<PathBuf>,
    pub notes: Vec<String>,
    pub results: Value,
}

impl Outcome {
    fn new(params: SystemParams) -> Self {
        Outcome {
            params,
            grid: Value::Null,
            seeds: Vec::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
            results: Value::Null,
        }
    }
}

pub fn execute(cmd: Command, ctx: &Context) -> Result<Outcome> {
    let params = ctx.config.system_params(cmd.default_preset())?;
    match cmd {
        Command::Potential => potential(ctx, params),
        Command::DephasingScan => dephasing_scan(ctx, params),
        Command::GateFidelity => gate_fidelity(ctx, params),
        Command::ClusterMc => cluster_mc(ctx, params),
        Command::Transport => transport(ctx, params),
        Command::Bloch => bloch(ctx, params),
    }
}

fn quadrature_spec(cfg: &Config, t_max: f64, r_max: f64) -> Result<QuadratureSpec> {
    let d = QuadratureSpec::resolving(t_max, r_max);
    Ok(QuadratureSpec {
        q_max_factor: cfg.f64_or("grid.q_max_factor", d.q_max_factor)?,
        tolerance: cfg.f64_or("grid.tolerance", d.tolerance)?,
        ..d
    })
}

/// Momentum grid from the grid.* keys.
pub fn build_grid(cfg: &Config, m: &Reduced, t_max: f64, r_max: f64) -> Result<(MomentumGrid, Value)> {
    let spec = quadrature_spec(cfg, t_max, r_max)?;
    match cfg.str("grid.mode")?.unwrap_or("thermodynamic") {
        "thermodynamic" => {
            let g = MomentumGrid::thermodynamic(m, &spec)?;
            let info = json!({
                "mode": "thermodynamic",
                "nodes": g.len(),
                "q_max": g.q_max(),
                "spec": spec,
            });
            Ok((g, info))
        }
        "finite" => {
            let sites = cfg.usize_or("grid.length_sites", 4000)?;
            let length = sites as f64 * m.spacing;
            let q_cut = spec.q_max_factor * (8.0 / m.x0).max(20.0 / m.healing_length());
            let n_max = match cfg.usize("grid.n_max")? {
                Some(n) => n,
                None => (q_cut * length / (2.0 * PI)).ceil() as usize,
            };
            let g = MomentumGrid::finite(m.dim, length, n_max)?;
            let info = json!({
                "mode": "finite",
                "nodes": g.len(),
                "length_sites": sites,
                "n_max": n_max,
            });
            Ok((g, info))
        }
        other => bail!("grid.mode must be thermodynamic or finite, got `{other}`"),
    }
}

fn potential(ctx: &Context, params: SystemParams) -> Result<Outcome> {
    let cfg = ctx.config;
    let m = params.reduced()?;
    let units = params.units();
    let dmax = cfg.usize_or("potential.delta_max", interaction::DEFAULT_DELTA_MAX)?;
    let (grid, info) = build_grid(cfg, &m, 0.0, dmax as f64 * m.spacing)?;
    let table = PotentialTable::build(&m, &grid, dmax)?;
    let three_d = m.dim == 3;
    let mut t = if three_d {
        Table::new(&["delta_sites", "r_lambda", "V_ER", "V_nK", "yukawa_ER"])
    } else {
        Table::new(&["delta_sites", "r_lambda", "V_ER", "V_nK"])
    };
    for (d, &v) in table.values.iter().enumerate() {
        let r = d as f64 * m.spacing;
        let mut row: Vec<Cell> = vec![d.into(), r.into(), v.into(), units.energy_to_nk(v).into()];
        if three_d {
            row.push(if d == 0 {
                Cell::S(String::new())
            } else {
                interaction::mediated_potential_3d_closed(&m, r)?.into()
            });
        }
        t.push(row);
    }
    let mut o = Outcome::new(params);
    o.outputs.push(t.write(ctx.out, "potential.csv")?);
    o.grid = info;
    o.notes.push("V is the magnitude of the attraction; the lattice Hamiltonian carries -V".into());
    let v12 = table.values.get(1).copied();
    o.results = json!({
        "onsite_ER": table.onsite(),
        "polaron_energy_ER": table.onsite(),
        "nearest_neighbour_ER": v12,
        "onsite_nK": units.energy_to_nk(table.onsite()),
    });
    Ok(o)
}

fn dephasing_scan(ctx: &Context, params: SystemParams) -> Result<Outcome> {
    let cfg = ctx.config;
    let m = params.reduced()?;
    let units = params.units();
    let axis = cfg.str("dephasing.axis")?.unwrap_or("time").to_string();
    let sep = cfg.f64_or("dephasing.separation", 5.0)?;
    let time_ms = cfg.f64_or("dephasing.time_ms", 10.0)?;
    let long = cfg.bool_or("dephasing.long_time", false)?;
    let (lo, hi, n, col) = match axis.as_str() {
        "time" => (0.0, 20.0, 41, "t_ms"),
        "distance" => (0.0, 20.0, 21, "d_sites"),
        "temperature" => (0.0, 20.0, 21, "T_nK"),
        other => bail!("dephasing.axis must be time, distance or temperature, got `{other}`"),
    };
    let lo = cfg.f64_or("dephasing.min", lo)?;
    let hi = cfg.f64_or("dephasing.max", hi)?;
    let n = cfg.usize_or("dephasing.points", n)?;
    let xs = linspace(lo, hi, n);
    let fixed_time = if long {
        TimeMode::LongTime
    } else {
        TimeMode::At(units.time_from_ms(time_ms))
    };
    let t_max = match axis.as_str() {
        "time" => units.time_from_ms(hi.max(lo)),
        _ => match fixed_time {
            TimeMode::At(t) => t,
            TimeMode::LongTime => 0.0,
        },
    };
    let r_max = if axis == "distance" { hi.max(lo) } else { sep } * m.spacing;
    let (grid, info) = build_grid(cfg, &m, t_max, r_max)?;
    let mut table = Table::new(&[
        col,
        "gamma0",
        "gamma_minus",
        "gamma_plus",
        "avg_fidelity",
        "independent_reservoir_fidelity",
    ]);
    for &x in &xs {
        let (model, r, time) = match axis.as_str() {
            "time" => (m, sep * m.spacing, TimeMode::At(units.time_from_ms(x))),
            "distance" => (m, x * m.spacing, fixed_time),
            _ => (m.with_kt(units.temperature_from_nk(x)), sep * m.spacing, fixed_time),
        };
        let g = dephasing::gamma_triple(&model, &grid, r, time)?.triple;
        table.push(vec![
            x.into(),
            g.gamma0.into(),
            g.gamma_minus.into(),
            g.gamma_plus.into(),
            qubitgate::average_fidelity(&g).into(),
            qubitgate::independent_reservoir_fidelity(g.gamma0).into(),
        ]);
    }
    let mut o = Outcome::new(params);
    o.outputs.push(table.write(ctx.out, "dephasing.csv")?);
    o.grid = info;
    if m.dim == 1 {
        o.notes.push(
            "one-dimensional condensate: the dephasing factors vanish for long times and large distances"
                .into(),
        );
    }
    o.results = json!({ "axis": axis, "points": xs.len(), "separation_sites": sep });
    Ok(o)
}

#[derive(serde::Serialize)]
struct GateReport {
    t_g_ms: f64,
    #[serde(rename = "v12_ER")]
    v12_er: f64,
    gamma0: f64,
    gamma_minus: f64,
    gamma_plus: f64,
    avg_fidelity: f64,
    independent_reservoir_fidelity: f64,
    method: &'static str,
}

fn gate_fidelity(ctx: &Context, params: SystemParams) -> Result<Outcome> {
    let cfg = ctx.config;
    let m = params.reduced()?;
    let units = params.units();
    let sep = cfg.usize_or("gate.separation", 1)?.max(1) as i64;
    let r = sep as f64 * m.spacing;
    let (grid, info) = build_grid(cfg, &m, 0.0, r)?;
    let v12 = interaction::mediated_potential(&m, &grid, sep)?;
    let mut o = Outcome::new(params);
    let t_g = if let Some(ms) = cfg.f64("gate.time_ms")? {
        units.time_from_ms(ms)
    } else if cfg.bool_or("gate.calibrate", false)? {
        qubitgate::calibrate_gate_time(&m, sep)?.0
    } else {
        qubitgate::gate_time(v12)?
    };
    let mut extra = json!({});
    let (triple, method) = if m.dim == 3 && m.kt <= 0.1 * m.gn0() {
        let lt = dephasing::gamma_triple(&m, &grid, r, TimeMode::LongTime)?.triple;
        extra["long_time_quadrature"] = json!({
            "gamma0": lt.gamma0,
            "gamma_minus": lt.gamma_minus,
            "gamma_plus": lt.gamma_plus,
            "avg_fidelity": qubitgate::average_fidelity(&lt),
        });
        extra["yukawa_v12_ER"] = json!(interaction::mediated_potential_3d_closed(&m, r)?);
        extra["bound_exponent"] = json!(dephasing::bound_exponent_3d(&m)?);
        o.notes.push("three-dimensional zero-temperature lower bounds used for the dephasing factors".into());
        (dephasing::gamma_bound_triple_3d(&m)?, "bound")
    } else {
        let (tg_grid, _) = build_grid(cfg, &m, t_g, r)?;
        let t = dephasing::gamma_triple(&m, &tg_grid, r, TimeMode::At(t_g))?.triple;
        (t, "quadrature")
    };
    let report = GateReport {
        t_g_ms: units.time_to_ms(t_g),
        v12_er: v12,
        gamma0: triple.gamma0,
        gamma_minus: triple.gamma_minus,
        gamma_plus: triple.gamma_plus,
        avg_fidelity: qubitgate::average_fidelity(&triple),
        independent_reservoir_fidelity: qubitgate::independent_reservoir_fidelity(triple.gamma0),
        method,
    };
    let mut value = serde_json::to_value(&report)?;
    if let Value::Object(extra) = extra {
        value.as_object_mut().expect("object").extend(extra);
    }
    let samples = cfg.usize_or("gate.haar_samples", 0)?;
    if samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let h = HaarMoments::sample(&mut rng, samples);
        let (mean, stderr) = h.fidelity(&triple);
        value["haar_fidelity"] = json!({ "samples": samples, "mean": mean, "stderr": stderr });
        o.seeds.push(ctx.seed);
    }
    let path = ctx.out.join("gate.json");
    std::fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    o.outputs.push(path);
    o.grid = info;
    o.results = value;
    Ok(o)
}

/// Chain settings for cluster-mc.
pub struct McSetup {
    pub geometry: Geometry,
    pub atoms: usize,
    pub template: McRun,
    pub seeds: Vec<u64>,
    pub full: bool,
    pub counting: PairCounting,
    pub delta_max: usize,
}

pub fn mc_setup(cfg: &Config, m: &Reduced, seed: u64) -> Result<McSetup> {
    let geometry = match m.dim {
        1 => Geometry::Ring(m.sites),
        2 => Geometry::Torus(m.sites),
        d => bail!("cluster-mc needs a 1D or 2D lattice, got dimension {d}"),
    };
    let default_atoms = match geometry {
        Geometry::Ring(n) => n / 5,
        Geometry::Torus(l) => (l * l) / 25,
    };
    let atoms = cfg.usize_or("mc.atoms", default_atoms)?;
    let (eq, steps, interval) = match geometry {
        Geometry::Ring(_) => (500_000, 1_000_000, 1_000),
        Geometry::Torus(_) => (1_000_000, 2_000_000, 2_000),
    };
    let mut template = McRun::new(
        seed,
        0.0,
        cfg.usize_or("mc.equilibration", eq)? as u64,
        cfg.usize_or("mc.steps", steps)? as u64,
        cfg.usize_or("mc.sample_interval", interval)? as u64,
    );
    template.moves = match cfg.str("mc.moves")?.unwrap_or("global") {
        "global" => MoveSet::Global,
        "local" => MoveSet::Local,
        other => bail!("mc.moves must be global or local, got `{other}`"),
    };
    let full = match cfg.str("mc.potential_mode")?.unwrap_or("nn") {
        "nn" => false,
        "full" => true,
        other => bail!("mc.potential_mode must be nn or full, got `{other}`"),
    };
    let counting = match cfg.str("mc.pair_counting")? {
        None => PairCounting::default_for(geometry),
        Some("ordered") => PairCounting::Ordered,
        Some("unordered") => PairCounting::Unordered,
        Some(other) => bail!("mc.pair_counting must be ordered or unordered, got `{other}`"),
    };
    let n_seeds = cfg.usize_or("mc.seeds", 20)?;
    Ok(McSetup {
        geometry,
        atoms,
        template,
        seeds: (0..n_seeds as u64).map(|i| seed.wrapping_add(i)).collect(),
        full,
        counting,
        delta_max: cfg.usize_or("mc.delta_max", interaction::DEFAULT_DELTA_MAX)?,
    })
}

fn cluster_mc(ctx: &Context, params: SystemParams) -> Result<Outcome> {
    let cfg = ctx.config;
    let m = params.reduced()?;
    let units = params.units();
    let setup = mc_setup(cfg, &m, ctx.seed)?;
    let dmax = if setup.full { setup.delta_max } else { 1 };
    let (grid, info) = build_grid(cfg, &m, 0.0, dmax as f64 * m.spacing)?;
    let table = PotentialTable::build(&m, &grid, dmax)?;
    let v12 = table.nearest_neighbour();
    let mode = if setup.full {
        PotentialMode::Full(table.clone())
    } else {
        PotentialMode::NearestNeighbour(v12)
    };
    let couplings = Couplings::new(setup.geometry, &mode, setup.counting, m.onsite_u)?;
    let (t_lo, t_hi) = match setup.geometry {
        Geometry::Ring(_) => (0.5, 10.0),
        Geometry::Torus(_) => (0.5, 4.0),
    };
    let temps = linspace(
        cfg.f64_or("mc.t_min_nK", t_lo)?,
        cfg.f64_or("mc.t_max_nK", t_hi)?,
        cfg.usize_or("mc.t_points", 12)?,
    );
    let sites = setup.geometry.sites();
    let filling = setup.atoms as f64 / sites as f64;
    let mut clusters = Table::new(&["T_nK", "mean_Nc_over_N", "std", "stderr_seeds", "analytic_Nc_over_N"]);
    let mut islands = Table::new(&["T_nK", "mean_NI_over_N", "std", "stderr_seeds", "analytic_NI_over_N"]);
    let mut acceptance = Vec::new();
    for &t_nk in &temps {
        let kt = units.temperature_from_nk(t_nk);
        let run = McRun {
            kt,
            ..setup.template.clone()
        };
        let stats = clustering::run_seeds(setup.geometry, setup.atoms, &couplings, &run, &setup.seeds)?;
        let pooled = McStats::pooled(&stats).context("no seeds")?;
        acceptance.push(pooled.acceptance());
        let nc = pooled.cluster_fraction();
        let ni = pooled.island_fraction();
        let nc_seed = Summary::of(stats.iter().map(|s| s.cluster_fraction().mean));
        let ni_seed = Summary::of(stats.iter().map(|s| s.island_fraction().mean));
        let (a_nc, a_ni) = match setup.geometry {
            Geometry::Ring(mm) => (
                clustering::analytic_cluster_number_1d(mm, setup.atoms, v12, kt)?,
                f64::NAN,
            ),
            Geometry::Torus(_) => (f64::NAN, clustering::analytic_island_size_2d(filling, v12, kt)?),
        };
        clusters.push(vec![t_nk.into(), nc.mean.into(), nc.std.into(), nc_seed.stderr.into(), a_nc.into()]);
        islands.push(vec![t_nk.into(), ni.mean.into(), ni.std.into(), ni_seed.stderr.into(), a_ni.into()]);
    }
    let mut o = Outcome::new(params);
    o.outputs.push(clusters.write(ctx.out, "cluster_number.csv")?);
    o.outputs.push(islands.write(ctx.out, "island_size.csv")?);
    if cfg.bool_or("mc.snapshot", false)? {
        if let Some(&t_nk) = temps.first() {
            let run = McRun {
                kt: units.temperature_from_nk(t_nk),
                seed: setup.seeds[0],
                ..setup.template.clone()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(run.seed ^ 0x9e37_79b9_7f4a_7c15);
            let start = clustering::LatticeConfiguration::random(setup.geometry, setup.atoms, &mut rng)?;
            let (_, cfg_final) = clustering::metropolis_run_with(start, &couplings, &run, |_| {})?;
            let path = ctx.out.join("snapshot.txt");
            std::fs::write(&path, cfg_final.snapshot())?;
            o.outputs.push(path);
        }
    }
    o.grid = info;
    o.seeds = setup.seeds.clone();
    o.notes.push("one Metropolis step is one proposed single-atom move".into());
    let mut results = json!({
        "v12_ER": v12,
        "sites": sites,
        "atoms": setup.atoms,
        "potential_mode": if setup.full { "full" } else { "nn" },
        "pair_counting": format!("{:?}", setup.counting),
        "temperatures_nK": temps,
        "acceptance": acceptance,
    });
    if let Geometry::Torus(_) = setup.geometry {
        let nr = 1.0 - 2.0 * filling;
        if (0.0..1.0).contains(&nr) {
            results["transition_temperature_nK"] =
                json!(units.temperature_to_nk(clustering::transition_temperature(v12, nr)?));
        }
        results["transition_temperature_dilute_limit_nK"] =
            json!(units.temperature_to_nk(clustering::transition_temperature(v12, 0.0)?));
    }
    o.results = results;
    Ok(o)
}

fn transport_sites(cfg: &Config, params: &SystemParams, m: &Reduced, t_end: f64) -> Result<usize> {
    if cfg.contains("lattice.sites") {
        return Ok(m.sites);
    }
    Ok(params.lattice.sites.max(qme::sites_for_no_reflection(m.hopping, t_end, 10)))
}

fn positivity(cfg: &Config) -> Result<Option<f64>> {
    cfg.f64("transport.positivity_abort").map_err(Into::into)
}

fn push_density(table: &mut Table, t_ms: f64, pops: &[f64]) {
    for (j, &p) in pops.iter().enumerate() {
        table.push(vec![t_ms.into(), j.into(), p.into()]);
    }
}

fn transport(ctx: &Context, params: SystemParams) -> Result<Outcome> {
    let cfg = ctx.config;
    let m = params.reduced()?;
    let units = params.units();
    let t_end = units.time_from_ms(cfg.f64_or("transport.t_end_ms", 8.2)?);
    let sites = transport_sites(cfg, &params, &m, t_end)?;
    let j0 = cfg.usize_or("transport.j0", sites / 2)?;
    let rho0 = DensityMatrix::localized(sites, j0)?;
    let (steps, dt) = qme::plan(&m, t_end, cfg.f64("transport.dt")?)?;
    let record = cfg.usize_or("transport.record_every", (steps / 82).max(1))?;
    let opts = EvolveOptions {
        dt: Some(dt),
        record_every: record,
        positivity_abort: positivity(cfg)?,
        ..EvolveOptions::default()
    };
    let mut o = Outcome::new(params);
    let grid = qme::kernel_grid(&m, sites, t_end)?;
    o.grid = json!({ "mode": "thermodynamic", "nodes": grid.len(), "q_max": grid.q_max(), "t_max": t_end });
    let cache = KernelCache::build(&m, &grid, sites, 0.5 * dt, 2 * steps + 1)?;
    let traj = qme::evolve_cached(&m, &rho0, &cache, steps, &opts)?;
    let mut density = Table::new(&["t_ms", "site", "p"]);
    let mut stats = Table::new(&["t_ms", "sigma_d_sites", "p_bar", "p_d", "mean_site"]);
    for (t, pops) in traj.times.iter().zip(&traj.populations) {
        let t_ms = units.time_to_ms(*t);
        push_density(&mut density, t_ms, pops);
        let s = qme::transport_stats(pops, j0);
        stats.push(vec![
            t_ms.into(),
            s.map_or(0.0, |s| s.sigma_d).into(),
            s.map_or(f64::NAN, |s| s.p_bar).into(),
            s.map_or(f64::NAN, |s| s.p_d).into(),
            qme::mean_position(pops).into(),
        ]);
    }
    o.outputs.push(density.write(ctx.out, "density.csv")?);
    o.outputs.push(stats.write(ctx.out, "transport_stats.csv")?);
    let end = qme::transport_stats(&traj.state.populations(), j0);
    let mut results = json!({
        "sites": sites,
        "j0": j0,
        "final": end,
        "diagnostics": traj.diagnostics,
    });

    let points = cfg.usize_or("transport.kappa_points", 0)?;
    if points > 0 {
        let kappas = linspace(
            cfg.f64_or("transport.kappa_min", 0.0)?,
            cfg.f64_or("transport.kappa_max", 3e-2)?,
            points,
        );
        let mut cross = Table::new(&["kappa", "sigma_d_sites", "p_bar", "p_d", "min_eigenvalue"]);
        let mut rows = Vec::new();
        let k_ref = kappas.iter().cloned().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
        let base = if cache.kappa != 0.0 || k_ref == 0.0 {
            cache.clone()
        } else {
            KernelCache::build(&m.with_kappa(k_ref), &grid, sites, 0.5 * dt, 2 * steps + 1)?
        };
        for &k in &kappas {
            let mk = m.with_kappa(k);
            let c = if k == 0.0 {
                KernelCache::zero(0.5 * dt, sites, 2 * steps + 1)
            } else {
                base.rescaled(k)?
            };
            let opts_k = EvolveOptions { record_every: 0, ..opts };
            let tr = qme::evolve_cached(&mk, &rho0, &c, steps, &opts_k)?;
            let s = qme::transport_stats(&tr.state.populations(), j0);
            cross.push(vec![
                k.into(),
                s.map_or(0.0, |s| s.sigma_d).into(),
                s.map_or(f64::NAN, |s| s.p_bar).into(),
                s.map_or(f64::NAN, |s| s.p_d).into(),
                tr.diagnostics.min_eigenvalue.into(),
            ]);
            rows.push(json!({ "kappa": k, "stats": s, "min_eigenvalue": tr.diagnostics.min_eigenvalue }));
        }
        o.outputs.push(cross.write(ctx.out, "crossover.csv")?);
        results["crossover"] = json!(rows);
    }
    if opts.positivity_abort.is_none() {
        o.notes.push(format!(
            "positivity recorded, not enforced; smallest eigenvalue {}",
            fmt(traj.diagnostics.min_eigenvalue)
        ));
    }
    o.results = results;
    Ok(o)
}

fn bloch(ctx: &Context, params: SystemParams) -> Result<Outcome> {
    let cfg = ctx.config;
    let m = params.reduced()?;
    let units = params.units();
    if m.stark == 0.0 {
        bail!("bloch needs a Stark tilt; set lattice.K or lattice.K_hz");
    }
    let period = 2.0 * PI / m.stark.abs();
    let periods = cfg.f64_or("bloch.periods", 1.0)?;
    let t_end = periods * period;
    let sites = if cfg.contains("lattice.sites") { m.sites } else { params.lattice.sites };
    let j0 = cfg.usize_or("transport.j0", sites / 2)?;
    let rho0 = DensityMatrix::localized(sites, j0)?;
    let (steps, _) = qme::plan(&m, t_end, cfg.f64("transport.dt")?)?;
    let record = cfg.usize_or("transport.record_every", (steps / 200).max(1))?;
    let opts = EvolveOptions {
        dt: cfg.f64("transport.dt")?,
        record_every: record,
        positivity_abort: positivity(cfg)?,
        ..EvolveOptions::default()
    };
    let traj = qme::evolve(&m, &rho0, t_end, &opts)?;
    let mut table = Table::new(&["t_ms", "mean_site", "sigma_d_sites", "p_j0"]);
    let mut density = Table::new(&["t_ms", "site", "p"]);
    let mut max_dev: f64 = 0.0;
    let mut widths = Vec::new();
    for (t, pops) in traj.times.iter().zip(&traj.populations) {
        let t_ms = units.time_to_ms(*t);
        let mean = qme::mean_position(pops);
        let w = qme::transport_stats(pops, j0).map_or(0.0, |s| s.sigma_d);
        max_dev = max_dev.max((mean - j0 as f64).abs());
        widths.push(w);
        table.push(vec![t_ms.into(), mean.into(), w.into(), pops[j0].into()]);
        push_density(&mut density, t_ms, pops);
    }
    let mut o = Outcome::new(params);
    o.outputs.push(table.write(ctx.out, "bloch.csv")?);
    o.outputs.push(density.write(ctx.out, "density.csv")?);
    let peak = widths.iter().cloned().fold(0.0, f64::max);
    let last = *widths.last().unwrap_or(&0.0);
    o.results = json!({
        "bloch_period_ms": units.time_to_ms(period),
        "sites": sites,
        "j0": j0,
        "revival_probability": traj.state.populations()[j0],
        "sigma_peak_sites": peak,
        "sigma_final_sites": last,
        "sigma_swing_sites": peak - last,
        "sigma_contrast": if peak > 0.0 { (peak - last) / (peak + last) } else { 0.0 },
        "max_mean_deviation_sites": max_dev,
        "diagnostics": traj.diagnostics,
    });
    Ok(o)
}

/// Γ triple helper for tests and callers that do not need the full point.
pub fn triple(m: &Reduced, grid: &MomentumGrid, r: f64, time: TimeMode) -> Result<GammaTriple> {
    Ok(dephasing::gamma_triple(m, grid, r, time)?.triple)
}
