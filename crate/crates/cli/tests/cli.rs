use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn igame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igame"))
        .args(args)
        .output()
        .expect("spawn igame")
}

fn run_ok(args: &[&str]) {
    let out = igame(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

/// `e^{Mt}` for a 2×2 matrix with distinct real eigenvalues (Sylvester's formula).
fn expm2(m: [[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    let (e1, e2) = ((l1 * t).exp(), (l2 * t).exp());
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            out[i][j] = (e1 * (m[i][j] - l2 * id) - e2 * (m[i][j] - l1 * id)) / (l1 - l2);
        }
    }
    out
}

#[test]
fn simulate_writes_documented_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    run_ok(&[
        "simulate",
        "--scenario",
        "affine-1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "time,phi_0,xi_0,u1_0,u2_0,eps1_0,eps2_0,ufree1_0,ufree2_0"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), (10.0f64 / 0.01).floor() as usize + 1);
    let meta = json(&out.join("trajectory.meta.json"));
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["rows"], 1001);

    // Closed loop of affine-1 assembled by hand: z' = M z + w, z = (φ, ξ).
    let m = [[-0.96, 0.42], [0.5, -1.0]];
    let w = [0.34, 0.0];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // Equilibrium z* = −M⁻¹w.
    let eq = [
        -(m[1][1] * w[0] - m[0][1] * w[1]) / det,
        -(-m[1][0] * w[0] + m[0][0] * w[1]) / det,
    ];
    let e = expm2(m, 10.0);
    let d = [1.0 - eq[0], 0.0 - eq[1]];
    let phi_end = eq[0] + e[0][0] * d[0] + e[0][1] * d[1];
    let last: Vec<f64> = rows
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((last[0] - 10.0).abs() < 1e-12);
    assert!(
        (last[1] - phi_end).abs() <= 1e-6,
        "{} vs {phi_end}",
        last[1]
    );
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        run_ok(&[
            "simulate",
            "--scenario",
            "verb-1",
            "--out",
            out.to_str().unwrap(),
        ]);
        run_ok(&[
            "verbalize",
            "--scenario",
            "verb-1",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    for file in [
        "trajectory.csv",
        "trajectory.meta.json",
        "verbalization.json",
    ] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn verbalize_hidden_dialogue_report() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "verbalize",
        "--scenario",
        "hidden-dialogue-1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let report = json(&dir.path().join("verbalization.json"));
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["verbalizable"], true);
    assert!(report["score"].as_f64().unwrap() >= 0.99);
    assert_eq!(report["boundaries"].as_array().unwrap().len(), 21);
    assert_eq!(report["symbols"].as_array().unwrap().len(), 20);
}

#[test]
fn estimate_on_constant_epsilon_rows_agree() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "estimate",
        "--scenario",
        "affine-1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let report = json(&dir.path().join("estimate.json"));
    assert_eq!(report["schema_version"], 1);
    for player in 0..2 {
        let rows = report["epsilon_hat"][player].as_array().unwrap();
        assert_eq!(rows.len(), 1001);
        let first = rows[0][0].as_f64().unwrap();
        for row in rows {
            assert!((row[0].as_f64().unwrap() - first).abs() <= 1e-10);
        }
    }
}

#[test]
fn dialogue_transcript_has_one_utterance_per_epoch() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "dialogue",
        "--scenario",
        "dlg-1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let report = json(&dir.path().join("transcript.json"));
    assert_eq!(report["epochs"], 10);
    assert_eq!(report["utterances"].as_array().unwrap().len(), 10);
    assert!(report["residual_max"].as_f64().unwrap() <= 1e-9);
    assert!(dir.path().join("dialogue_trace.csv").exists());
}

#[test]
fn ingested_trajectory_matches_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    run_ok(&[
        "simulate",
        "--scenario",
        "jump-1",
        "--out",
        sim.to_str().unwrap(),
    ]);
    let cfg = write_config(
        dir.path(),
        r#"{"command": "predict", "scenario": "jump-1", "analysis": {"input": "sim/trajectory.csv"}}"#,
    );
    let ingested = dir.path().join("ingested");
    let direct = dir.path().join("direct");
    run_ok(&[
        "predict",
        "--config",
        &cfg,
        "--out",
        ingested.to_str().unwrap(),
    ]);
    run_ok(&[
        "predict",
        "--scenario",
        "jump-1",
        "--out",
        direct.to_str().unwrap(),
    ]);
    let a = json(&ingested.join("prediction.json"));
    let b = json(&direct.join("prediction.json"));
    assert_eq!(a["anchors"], b["anchors"]);
    assert!(a["source"]["input"].is_string());
}

#[test]
fn predict_reports_failed_anchors_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "affine-1", "analysis": {"anchors": [2.0, 2.005], "horizon": 0.5}}"#,
    );
    run_ok(&[
        "predict",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let report = json(&dir.path().join("prediction.json"));
    let anchors = report["anchors"].as_array().unwrap();
    assert!(anchors[0]["max_error"].as_f64().unwrap() <= 1e-8);
    assert!(anchors[1]["max_error"].is_null());
    assert!(anchors[1]["error"].as_str().unwrap().contains("grid"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "verb-1", "overrides": {"seed": 1}}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_ok(&["simulate", "--config", &cfg, "--out", a.to_str().unwrap()]);
    run_ok(&[
        "simulate",
        "--config",
        &cfg,
        "--seed",
        "2",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(json(&a.join("trajectory.meta.json"))["seed"], 1);
    assert_eq!(json(&b.join("trajectory.meta.json"))["seed"], 2);
}

#[test]
fn validation_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let mismatch = write_config(
        dir.path(),
        r#"{"command": "simulate", "scenario": "affine-1"}"#,
    );
    assert_eq!(
        igame(&["estimate", "--config", &mismatch, "--out", out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(igame(&["estimate", "--out", out]).status.code(), Some(1));
    assert_eq!(
        igame(&["dialogue", "--scenario", "affine-1", "--out", out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        igame(&["simulate", "--scenario", "all", "--out", out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        igame(&["simulate", "--seed", "x", "--scenario", "verb-1"])
            .status
            .code(),
        Some(1)
    );

    let csv = dir.path().join("partial.csv");
    std::fs::write(
        &csv,
        "time,phi_0,xi_0,ufree1_0,ufree2_0\n0,1,0,0,0\n0.01,1,0,0,0\n",
    )
    .unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"scenario": "affine-1", "analysis": {{"input": {:?}}}}}"#,
            csv.display().to_string()
        ),
    );
    let res = igame(&["estimate", "--config", &cfg, "--out", out]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("realized-control"));
}

#[test]
fn help_exits_cleanly() {
    let out = igame(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verbalize"));
}

#[test]
fn shipped_configs_run() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut entries: Vec<_> = std::fs::read_dir(&configs)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    assert!(!entries.is_empty());
    for path in entries {
        let cfg = json(&path);
        let command = cfg["command"].as_str().unwrap();
        let dir = tempfile::tempdir().unwrap();
        run_ok(&[
            command,
            "--config",
            path.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
    }
}
