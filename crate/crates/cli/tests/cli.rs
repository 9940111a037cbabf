use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cylquant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cylquant"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Entry `(j, k)` of an exported matrix as `[re, im]`.
fn entry(m: &Value, j: i64, k: i64) -> (f64, f64) {
    let lo = m["lo"].as_i64().unwrap();
    let dim = m["hi"].as_i64().unwrap() - lo + 1;
    let e = &m["entries"][((j - lo) * dim + (k - lo)) as usize];
    (e[0].as_f64().unwrap(), e[1].as_f64().unwrap())
}

#[test]
fn symmetric_angle_operator_entry() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("matrix.json");
    let out = cylquant(&[
        "quantize",
        "--observable",
        "angle",
        "--kernel",
        "symmetric",
        "--N",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let m = read_json(&path);
    assert_eq!(entry(&m, 1, 0), (0.0, -1.0));
    assert_eq!(entry(&m, 0, 1), (0.0, 1.0));
}

#[test]
fn pb_number_state_variance() {
    let v = stdout_json(&cylquant(&[
        "variance", "--method", "pb", "--n", "0", "--s", "10000",
    ]));
    assert!((v["variance"].as_f64().unwrap() - 3.289868).abs() < 1e-3);
}

#[test]
fn weyl_unity_is_identity() {
    let m: Value = stdout_json(&cylquant(&[
        "quantize",
        "--observable",
        "unity",
        "--kernel",
        "weyl",
        "--N",
        "3",
    ]));
    for j in -3..=3 {
        for k in -3..=3 {
            assert_eq!(entry(&m, j, k), (if j == k { 1.0 } else { 0.0 }, 0.0));
        }
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.toml");
    std::fs::write(&cfg, "kernel = \"weyl\"\nN = 2\nhbar = 0.5\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = stdout_json(&cylquant(&[
        "--config",
        c,
        "quantize",
        "--observable",
        "momentum",
    ]));
    assert_eq!(from_file["hi"], 2);
    assert_eq!(entry(&from_file, 2, 2), (1.0, 0.0));
    let flagged = stdout_json(&cylquant(&[
        "--config",
        c,
        "quantize",
        "--observable",
        "momentum",
        "--hbar",
        "2",
        "--N",
        "1",
    ]));
    assert_eq!(flagged["hi"], 1);
    assert_eq!(entry(&flagged, 1, 1), (2.0, 0.0));
}

#[test]
fn exports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = cylquant(&[
            "uncertainty",
            "--mode",
            "circle",
            "--states",
            "random:40:9",
            "--N",
            "8",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn matrix_csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gw.csv");
    let out = cylquant(&[
        "phase-op",
        "--kind",
        "gw",
        "--s",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next(), Some("j,k,re,im"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn pov_distribution_from_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("psi.json");
    std::fs::write(
        &state,
        "{\"s\": 1, \"coefficients\": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}",
    )
    .unwrap();
    let dist = dir.path().join("dist.csv");
    let v = stdout_json(&cylquant(&[
        "pov-dist",
        "--state",
        state.to_str().unwrap(),
        "--grid",
        "64",
        "--out",
        dist.to_str().unwrap(),
    ]));
    assert!((v["total_probability"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(std::fs::read_to_string(dist).unwrap().lines().count(), 65);
}

#[test]
fn conjecture_mode_reports_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("conj.csv");
    let v = stdout_json(&cylquant(&[
        "uncertainty",
        "--mode",
        "phase-conjecture",
        "--states",
        "random:30:4",
        "--N",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]));
    assert_eq!(v["conjecture"], true);
    assert_eq!(v["states"], 30);
}

#[test]
fn invalid_input_exits_nonzero() {
    for args in [
        &["quantize", "--observable", "angle", "--N", "-3"][..],
        &["quantize", "--observable", "nope", "--N", "3"],
        &[
            "quantize",
            "--observable",
            "angle",
            "--N",
            "3",
            "--hbar",
            "-1",
        ],
        &["quantize", "--observable", "angle"],
        &["variance", "--method", "gw", "--n", "5", "--s", "3"],
        &[
            "uncertainty",
            "--mode",
            "circle",
            "--states",
            "random:5",
            "--N",
            "4",
        ],
        &[
            "--config",
            "/nonexistent.toml",
            "variance",
            "--method",
            "pb",
            "--n",
            "0",
            "--s",
            "3",
        ],
    ] {
        let out = cylquant(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn uncentered_file_states_are_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let states = dir.path().join("states.json");
    std::fs::write(
        &states,
        "[{\"lo\": 0, \"coefficients\": [[1, 0], [1, 0]]}, {\"lo\": 0, \"coefficients\": [[1, 0], [0, 1]]}]",
    )
    .unwrap();
    let report = dir.path().join("r.csv");
    let v = stdout_json(&cylquant(&[
        "uncertainty",
        "--mode",
        "circle",
        "--states",
        states.to_str().unwrap(),
        "--N",
        "2",
        "--out",
        report.to_str().unwrap(),
    ]));
    assert_eq!(v["tested"], 1);
    assert_eq!(v["precondition_violated"], 1);
    assert_eq!(v["violations"], 0);
}
