// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::Command as Process;

use bec_lattice::config::Config;
use bec_lattice_cli::{run, Command};

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_bec-lattice"))
}

fn cfg(pairs: &[&str]) -> Config {
    let mut c = Config::default();
    for p in pairs {
        c.apply_override(p).unwrap();
    }
    c
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let c = cfg(&["mc.seeds=3", "mc.steps=20000", "mc.equilibration=2000", "mc.t_points=3"]);
    for (cmd, file) in [(Command::Potential, "potential.csv"), (Command::ClusterMc, "cluster_number.csv")] {
        let a = tmp.path().join("a");
        let b = tmp.path().join("b");
        run(cmd, &c, &a, 42).unwrap();
        run(cmd, &c, &b, 42).unwrap();
        assert_eq!(read(&a, file), read(&b, file), "{}", cmd.name());
    }
}

#[test]
fn empty_scan_writes_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(Command::DephasingScan, &cfg(&["dephasing.points=0"]), tmp.path(), 1).unwrap();
    let text = read(tmp.path(), "dephasing.csv");
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("t_ms,gamma0,gamma_minus,gamma_plus"));
    assert_eq!(m.outputs, vec!["dephasing.csv".to_string()]);
    assert!(tmp.path().join("manifest.json").exists());
}

#[test]
fn distance_scan_shows_sub_and_superdecoherence_converging() {
    let tmp = tempfile::tempdir().unwrap();
    let c = cfg(&["dephasing.axis=\"distance\"", "dephasing.min=1", "dephasing.max=40", "dephasing.points=5"]);
    run(Command::DephasingScan, &c, tmp.path(), 1).unwrap();
    let text = read(tmp.path(), "dephasing.csv");
    let minus = column(&text, "gamma_minus");
    let plus = column(&text, "gamma_plus");
    assert!(minus.windows(2).all(|w| w[1] <= w[0]));
    assert!(plus.windows(2).all(|w| w[1] >= w[0]));
    let gap = |i: usize| (minus[i] - plus[i]).abs();
    assert!(gap(4) < gap(0));
}

#[test]
fn gate_report_has_documented_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let c = cfg(&["gate.haar_samples=2000"]);
    run(Command::GateFidelity, &c, tmp.path(), 3).unwrap();
    let v: serde_json::Value = serde_json::from_str(&read(tmp.path(), "gate.json")).unwrap();
    for k in ["t_g_ms", "gamma0", "gamma_minus", "gamma_plus", "avg_fidelity", "independent_reservoir_fidelity"] {
        assert!(v[k].is_number(), "{k}");
    }
    let f = v["avg_fidelity"].as_f64().unwrap();
    let h = &v["haar_fidelity"];
    let z = (h["mean"].as_f64().unwrap() - f) / h["stderr"].as_f64().unwrap();
    assert!(z.abs() < 4.0, "{z}");
}

#[test]
fn binary_accepts_global_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.toml");
    std::fs::write(&conf, "preset = \"fig5\"\n[potential]\ndelta_max = 4\n").unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["--config", conf.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .args(["--seed", "9", "--threads", "1", "--override", "potential.delta_max=3", "potential"])
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert_eq!(read(&out, "potential.csv").lines().count(), 5);
    let m: serde_json::Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(m["seed"], 9);
    assert_eq!(m["preset"], "fig5");
    assert_eq!(m["subcommand"], "potential");
}

#[test]
fn unknown_key_fails_and_lists_valid_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--out", tmp.path().to_str().unwrap(), "--override", "bec.densty=3", "potential"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bec.densty"));
    assert!(err.contains("bec.density"));
}

#[test]
fn bloch_keeps_mean_position() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(Command::Bloch, &cfg(&["bloch.periods=0.5"]), tmp.path(), 1).unwrap();
    assert!(m.results["max_mean_deviation_sites"].as_f64().unwrap() < 1e-6);
    let csv = read(tmp.path(), "bloch.csv");
    assert!(column(&csv, "p_j0").iter().all(|p| (0.0..=1.0).contains(p)));
}
