// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::process::{Command, Output};

fn ness_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ness-lab"))
        .args(args)
        .env_remove("NESS_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = ness_lab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn lookup(text: &str, key: &str) -> f64 {
    let (_, rows) = csv(text);
    rows.iter().find(|r| r[0] == key).unwrap_or_else(|| panic!("no {key}"))[1].parse().unwrap()
}

fn file_hash(path: &Path) -> u64 {
    let mut h = DefaultHasher::new();
    std::fs::read(path).unwrap().hash(&mut h);
    h.finish()
}

#[test]
fn steady_reference_point() {
    let out = ok(&["steady", "--z1", "0", "--z2", "-1", "--g1", "2", "--g2", "2", "--p", "0"]);
    assert_eq!(csv(&out).0, ["quantity", "value"]);
    assert!((lookup(&out, "q_dot") + 0.25).abs() < 1e-12);
    assert!((lookup(&out, "rho_im_12") - 0.125).abs() < 1e-12);
    assert!((lookup(&out, "s1") + 0.25).abs() < 1e-12);
    assert_eq!(lookup(&out, "concurrence"), 0.0);
    // 17 significant digits
    let q = csv(&out).1.into_iter().find(|r| r[0] == "q_dot").unwrap()[1].clone();
    assert_eq!(q.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
}

#[test]
fn steady_equilibrium_and_memory_gain() {
    let eq = ok(&["steady", "--z1", "-0.3", "--z2", "-0.3", "--g1", "1", "--g2", "5", "--u1", "1", "--u2", "1", "--p", "0.7"]);
    assert_eq!(lookup(&eq, "concurrence"), 0.0);
    assert!(lookup(&eq, "q_dot").abs() < 1e-12);
    let base = ["steady", "--z1", "0", "--z2", "-1", "--g1", "2", "--g2", "2", "--u1", "2", "--u2", "2"];
    let with = ok(&[&base[..], &["--p", "1"]].concat());
    let without = ok(&[&base[..], &["--p", "0"]].concat());
    assert!(lookup(&with, "concurrence") > lookup(&without, "concurrence"));
}

#[test]
fn steady_json() {
    let out = ok(&["--format", "json", "steady", "--z1", "0", "--z2", "-1", "--g1", "2", "--g2", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["q_dot"].as_f64().unwrap() + 0.25).abs() < 1e-12);
    assert_eq!(v["rho"]["re"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(ness_lab(&["steady", "--z1", "2", "--z2", "0", "--g1", "1", "--g2", "1"]).status.code(), Some(2));
    assert_eq!(ness_lab(&["steady", "--z1", "0"]).status.code(), Some(2));
    assert_eq!(ness_lab(&["cmax-map", "--grid-n", "3"]).status.code(), Some(2));
    assert_eq!(ness_lab(&["cq-region", "--z1", "0", "--z2", "-1", "--samples", "10"]).status.code(), Some(2));
    assert_eq!(ness_lab(&["collide", "--z1", "0", "--z2", "-1", "--g1", "1", "--g2", "1", "--steps", "0"]).status.code(), Some(2));
    // No dissipation reaches the system: the steady state is not unique.
    assert_eq!(ness_lab(&["steady", "--z1", "0", "--z2", "-1", "--g1", "2", "--g2", "2", "--p", "1"]).status.code(), Some(3));
    // A grid cap of one refinement cannot settle 𝒩 for a revival.
    let out = ness_lab(&[
        "divisibility", "--z1", "-1", "--z2", "1", "--p", "1", "--g1", "4.6", "--g2", "4.6", "--u1", "2.3", "--u2", "2.3",
        "--grid", "9000",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn cmax_map_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec!["cmax-map".to_string(), "--p".into(), "0".into(), "--grid-n".into(), "5".into(), "--starts".into(), "4".into(),
             "--seed".into(), "9".into(), "--out".into(), p.to_str().unwrap().into()]
    };
    let run = |p: &Path, threads: &str| {
        let mut v = args(p);
        v.extend(["--threads".into(), threads.into()]);
        let out = ness_lab(&v.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(&a, "1");
    run(&b, "2");
    assert_eq!(file_hash(&a), file_hash(&b));

    let text = std::fs::read_to_string(&a).unwrap();
    let (header, rows) = csv(&text);
    assert_eq!(header, ["z1", "z2", "c_max", "g1", "g2", "u1", "u2", "q_dot", "n_evaluations", "converged"]);
    assert_eq!(rows.len(), 25);
    for r in &rows {
        let (z1, z2, c): (f64, f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap());
        if z1 == z2 {
            assert_eq!(c, 0.0);
        }
        if (z1, z2) == (-1.0, 1.0) {
            assert!(c > 0.3);
        }
    }
}

#[test]
fn cq_region_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("region.csv");
    let o = ness_lab(&["cq-region", "--z1", "0", "--z2", "-1", "--p", "0", "--samples", "1000", "--bins", "50", "--seed", "4",
        "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["q_abs", "c", "g1", "g2", "u1", "u2"]);
    assert!(rows.len() >= 1000);
    let hull: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("region.hull.json")).unwrap()).unwrap();
    assert!(hull["overhang"].is_null());
    assert_eq!(hull["bins"].as_array().unwrap().len(), 50);
    assert!((hull["q_max"].as_f64().unwrap() - 0.25).abs() < 1e-6);
}

#[test]
fn divisibility_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("det.csv");
    let o = ness_lab(&["divisibility", "--z1", "0.3", "--z2", "-0.8", "--p", "0", "--g1", "1", "--g2", "2",
        "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["t", "det_abs"]);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("det.summary.json")).unwrap()).unwrap();
    assert!(summary["n_measure"].as_f64().unwrap() < 1e-12);
    assert_eq!(summary["non_divisible"], false);

    let json = ok(&["--format", "json", "divisibility", "--z1", "-1", "--z2", "1", "--p", "1", "--use-cmax-params"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["summary"]["n_measure"].as_f64().unwrap() > 0.0);
    assert_eq!(v["det_abs"][0].as_f64().unwrap(), 1.0);
}

#[test]
fn collide_trajectory() {
    let flat = ok(&["collide", "--z1", "-0.4", "--z2", "-0.4", "--g1", "1", "--g2", "2", "--u1", "1", "--u2", "1", "--p", "0.5",
        "--init", "thermal", "--steps", "50"]);
    let (header, rows) = csv(&flat);
    assert_eq!(header, ["step", "t", "concurrence", "d_e1", "d_e2", "cumulative_q1"]);
    assert_eq!(rows.len(), 50);
    for r in &rows {
        assert!(r[3].parse::<f64>().unwrap().abs() < 1e-15 && r[4].parse::<f64>().unwrap().abs() < 1e-15);
    }

    // Relaxed trajectory against the steady state at dt = 1e-3.
    let model = ["--z1", "-1", "--z2", "1", "--g1", "2", "--g2", "2", "--u1", "1", "--u2", "1", "--p", "1"];
    let traj = ok(&[&["collide"], &model[..], &["--dt", "1e-3", "--steps", "20000", "--every", "20000"]].concat());
    let (_, rows) = csv(&traj);
    let c_final: f64 = rows.last().unwrap()[2].parse().unwrap();
    let steady = ok(&[&["steady"], &model[..]].concat());
    assert!((c_final - lookup(&steady, "concurrence")).abs() < 1e-3, "{c_final}");
}
