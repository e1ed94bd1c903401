use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn radplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path, command: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{command}.json"))).unwrap()).unwrap()
}

/// RK4 for u'' + (2/r)u' = (r^2/9) u + (2/3) u ln u, u(0) = 1, u'(0) = 0.
fn model_rk4(r_end: f64, steps: usize) -> f64 {
    let f = |r: f64, u: f64, v: f64| r * r / 9.0 * u + 2.0 / 3.0 * u * u.ln() - 2.0 / r * v;
    let r0 = 1e-6;
    let h = (r_end - r0) / steps as f64;
    let (mut r, mut u, mut v) = (r0, 1.0f64, 0.0f64);
    for _ in 0..steps {
        let (k1u, k1v) = (v, f(r, u, v));
        let (k2u, k2v) = (
            v + 0.5 * h * k1v,
            f(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v),
        );
        let (k3u, k3v) = (
            v + 0.5 * h * k2v,
            f(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v),
        );
        let (k4u, k4v) = (v + h * k3v, f(r + h, u + h * k3u, v + h * k3v));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
    }
    u
}

#[test]
fn solve_writes_csv_matching_an_independent_integrator() {
    let dir = tempfile::tempdir().unwrap();
    let out = radplan(&[
        "solve",
        "--model-log",
        "--N",
        "3",
        "--sigma",
        "1,1,1",
        "--alpha",
        "1",
        "--u0",
        "1",
        "--r-max",
        "2",
        "--n-grid",
        "4001",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let mut rdr = csv::Reader::from_path(dir.path().join("solution.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["r", "u", "du"]);
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4001);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    let last = rows.last().unwrap();
    assert_eq!(last[0], 2.0);
    assert!((last[1] - model_rk4(2.0, 20_000)).abs() < 1e-4);

    let rep = report(dir.path(), "solve");
    assert_eq!(rep["status"], "ok");
    assert_eq!(rep["config_hash"].as_str().unwrap().len(), 64);
    assert!(dir.path().join("config.json").exists());
}

#[test]
fn classify_decaying_coefficient_is_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let out = radplan(&[
        "classify",
        "--a",
        "exp(-r)",
        "--b",
        "0",
        "--pair",
        "model-log",
        "--N",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let res = &report(dir.path(), "classify")["result"];
    assert_eq!(res["classification"], "Bounded");
    assert!(res["p_bar_finite"].as_bool().unwrap());
    // int_0^inf r e^{-r} dr / (N - 2) = 1
    assert!((res["p_bar_estimate"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(res["limit_identity"]["status"], "Finite");
}

#[test]
fn classify_model_is_large() {
    let dir = tempfile::tempdir().unwrap();
    let out = radplan(&["classify", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let res = &report(dir.path(), "classify")["result"];
    assert_eq!(res["classification"], "Large");
    assert!(!res["p_under_finite"].as_bool().unwrap());
}

#[test]
fn simulate_is_reproducible_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = |d: &str| {
        vec![
            "simulate".to_string(),
            "--seed".into(),
            "42".into(),
            "--paths".into(),
            "200".into(),
            "--horizon".into(),
            "1".into(),
            "--dt".into(),
            "0.01".into(),
            "--r-max".into(),
            "10".into(),
            "--n-grid".into(),
            "4001".into(),
            "--probes".into(),
            "5".into(),
            "--out".into(),
            d.into(),
        ]
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let argv = args(d.to_str().unwrap());
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let out = radplan(&argv);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let (ra, rb) = (report(&a, "simulate"), report(&b, "simulate"));
    assert_eq!(ra["config_hash"], rb["config_hash"]);
    assert_eq!(ra["result"], rb["result"]);
    assert!(ra["result"]["cost_mean"].as_f64().unwrap() > 0.0);
    assert_eq!(ra["result"]["per_policy"].as_array().unwrap().len(), 5);
}

#[test]
fn exit_codes_follow_failure_kind() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(radplan(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(
        radplan(&["solve", "--n-grid", "many"]).status.code(),
        Some(64)
    );
    assert_eq!(radplan(&["--help"]).status.code(), Some(0));

    let bad_alpha = dir.path().join("alpha");
    assert_eq!(
        radplan(&[
            "solve",
            "--alpha",
            "-1",
            "--out",
            bad_alpha.to_str().unwrap()
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(report(&bad_alpha, "solve")["status"], "validation-failure");
    assert_eq!(
        radplan(&["solve", "--a", "r^", "--model-log", "--out", d])
            .status
            .code(),
        Some(2)
    );

    let blow = dir.path().join("blow");
    let out = radplan(&[
        "solve",
        "--a",
        "exp(r)",
        "--b",
        "0",
        "--pair",
        "power:3,1,1",
        "--r-max",
        "5",
        "--out",
        blow.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let rep = report(&blow, "solve");
    assert_eq!(rep["status"], "numeric-failure");
    assert!(rep["error"].as_str().unwrap().contains("blew up"));

    let starved = dir.path().join("starved");
    let out = radplan(&[
        "solve",
        "--r-max",
        "2",
        "--max-iter",
        "2",
        "--out",
        starved.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(starved.join("solution.csv").exists());
}

#[test]
fn config_file_reproduces_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let out = radplan(&[
        "model",
        "--N",
        "2",
        "--sigma",
        "1,0.5",
        "--alpha",
        "0.7",
        "--u0",
        "1.3",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let second = dir.path().join("second");
    let out = radplan(&[
        "model",
        "--config",
        first.join("config.json").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (a, b) = (report(&first, "model"), report(&second, "model"));
    assert_eq!(a["config_hash"], b["config_hash"]);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(
        fs::read(first.join("value.csv")).unwrap(),
        fs::read(second.join("value.csv")).unwrap()
    );

    // a config for a different command is rejected
    let out = radplan(&[
        "solve",
        "--config",
        first.join("config.json").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = radplan(&["verify", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(dir.path(), "verify")["result"]["all_pass"], true);
}
