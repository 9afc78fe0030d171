use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gausstest"))
        .args(args)
        .env_remove("GAUSSTEST_SEED")
        .output()
        .expect("spawn gausstest")
}

fn json_of(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON report")
}

#[test]
fn rotation_test_fock1_test5() {
    let out = run(&[
        "rotation-test", "--test", "5", "--state", "fock:1", "--rounds", "10000", "--seed", "7",
    ]);
    let v = json_of(&out);
    assert_eq!(v["schema_version"], 1);
    let r = &v["results"];
    let exact = r["exact_probability"].as_f64().unwrap();
    assert!((exact - 5.0 / 9.0).abs() < 1e-9);
    let frac = r["accept_fraction"].as_f64().unwrap();
    let sigma = (exact * (1.0 - exact) / 10000.0f64).sqrt();
    assert!((frac - exact).abs() < 4.0 * sigma, "frac {frac}");
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn covariance_test_thermal_far() {
    let out = run(&[
        "covariance-test", "--state", "thermal:0.5", "--epsB", "0.3", "--E", "1", "--delta",
        "0.1", "--seed", "1",
    ]);
    let v = json_of(&out);
    assert_eq!(v["results"]["decision"], "B_far");
}

#[test]
fn bounds_vacuum_fock1() {
    let out = run(&["bounds", "--pair", "vacuum", "fock:1"]);
    let v = json_of(&out);
    let r = &v["results"];
    let lower = r["general_pair"]["lower"].as_f64().unwrap();
    assert!((lower - 4.0 / (3098.0 * 2.25)).abs() < 1e-12);
    assert!((r["exact_trace_distance"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(r["general_pair"]["upper_clamped"], 1.0);
    assert_eq!(r["general_pair"]["sandwich_ok"], true);
}

#[test]
fn reproducibility_byte_identical() {
    // every subcommand, run twice with the same seed
    let cases: Vec<Vec<&str>> = vec![
        vec!["state", "--state", "thermal:1"],
        vec!["moments", "--state", "squeezed:0.3"],
        vec!["rotation-test", "--test", "2", "--state", "vacuum", "--rounds", "500", "--seed", "4"],
        vec![
            "covariance-test", "--state", "vacuum", "--epsB", "0.3", "--E", "1", "--delta",
            "0.1", "--seed", "4", "--shots", "2000",
        ],
        vec!["bounds", "--pair", "vacuum", "coherent:1"],
        vec![
            "hardness", "--n", "2", "--grid", "2", "--eps", "0.1", "--trials", "3", "--seed", "4",
        ],
    ];
    for args in cases {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "non-deterministic output for {args:?}");
    }
}

#[test]
fn env_seed_override() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_gausstest"))
        .args(["rotation-test", "--test", "5", "--state", "fock:1", "--rounds", "200"])
        .env("GAUSSTEST_SEED", "11")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 11);
    let explicit = run(&[
        "rotation-test", "--test", "5", "--state", "fock:1", "--rounds", "200", "--seed", "11",
    ]);
    assert_eq!(with_env.stdout, explicit.stdout);
}

#[test]
fn exit_codes() {
    // infeasible parameters -> 2
    let out = run(&[
        "covariance-test", "--state", "vacuum", "--epsA", "0.001", "--epsB", "0.1", "--E", "1",
        "--delta", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // bad fixture -> 2 (config error)
    let out = run(&["state", "--state", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    // success -> 0
    let out = run(&["state", "--state", "vacuum"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let report = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "command": "rotation-test",
            "test": "5",
            "state": "fock:1",
            "rounds": 300,
            "seed": 7,
            "output": report.to_str().unwrap(),
        })
        .to_string(),
    )
    .unwrap();
    let out = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "rotation-test");
    // strict parsing: unknown fields rejected
    std::fs::write(
        &cfg,
        serde_json::json!({
            "command": "rotation-test",
            "test": "5",
            "state": "fock:1",
            "bogus_field": 1,
        })
        .to_string(),
    )
    .unwrap();
    let out = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bogus_field"), "stderr: {msg}");
}

#[test]
fn inline_json_state() {
    // (|0> + |4>)/sqrt(2) as inline amplitudes
    let mut amps = vec![[0.0, 0.0]; 8];
    amps[0] = [std::f64::consts::FRAC_1_SQRT_2, 0.0];
    amps[4] = [std::f64::consts::FRAC_1_SQRT_2, 0.0];
    let spec = serde_json::json!({"fock": {"n": 1, "cutoff": 8, "amplitudes": amps}}).to_string();
    let out = run(&["state", "--state", &spec]);
    let v = json_of(&out);
    // energy of the cat: (0.5 + 4.5)/2 = 2.5
    assert!((v["results"]["energy"].as_f64().unwrap() - 2.5).abs() < 1e-9);
}

#[test]
fn hardness_csv_format() {
    let out = run(&[
        "hardness", "--n", "2", "--grid", "2,3", "--eps", "0.1", "--trials", "3", "--seed", "2",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("E,nu,cutoff,"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn moments_gaussian_identity() {
    // thermal nu = 3: g2 = (nu^2-1)/2 = 4
    let out = run(&["moments", "--state", "thermal:1", "--which", "g"]);
    let v = json_of(&out);
    let g2 = v["results"]["generators"]["g"]["g2"].as_f64().unwrap();
    assert!((g2 - 4.0).abs() < 1e-6, "g2 = {g2}");
}
