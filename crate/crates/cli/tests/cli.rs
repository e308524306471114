//! End-to-end tests driving the compiled binary.

use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pencil-lab"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary launches")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn verify_passes_on_a_small_exact_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("cert.json");
    let output = run(&[
        "verify",
        "--n",
        "2",
        "--mu",
        "0,1,2,3,4",
        "--seed",
        "7",
        "--samples",
        "20",
        "--out",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let cert: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(&cert_path).unwrap(),
    )
    .unwrap();
    assert_eq!(cert["schema"], 1);
    assert_eq!(cert["overall_pass"], true);
    assert_eq!(cert["config"]["n"], 2);
    assert_eq!(cert["config"]["seed"], 7);
    let checks = cert["checks"].as_array().unwrap();
    assert!(checks.len() >= 25);
    let mut names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let sorted = {
        let mut copy = names.clone();
        copy.sort();
        copy
    };
    assert_eq!(names, sorted, "records are ordered by name");
    names.dedup();
    assert_eq!(names.len(), checks.len(), "no duplicate check names");
    assert!(checks.iter().all(|c| c["pass"] == true));
    // The span check at n = 2 reports the family spanning dimension 2.
    let span = checks.iter().find(|c| c["name"] == "span_rank").unwrap();
    assert_eq!(span["pass"], true);
}

#[test]
fn verify_is_deterministic_up_to_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    for path in [&first, &second] {
        let output = run(&[
            "verify",
            "--n",
            "2",
            "--seed",
            "42",
            "--samples",
            "15",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0));
    }
    let mut a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&second).unwrap()).unwrap();
    a["wall_time_seconds"] = 0.into();
    b["wall_time_seconds"] = 0.into();
    assert_eq!(a, b);
}

#[test]
fn verify_rejects_repeated_parameters_with_usage_exit() {
    let output = run(&["verify", "--n", "2", "--mu", "0,0,2,3,4"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("not separated"), "stderr: {stderr}");
}

#[test]
fn verify_rejects_unknown_tolerance_names() {
    let output = run(&["verify", "--tol", "bogus=1e-3"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn verify_suite_filter_restricts_the_checks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dyn.json");
    let output = run(&[
        "verify",
        "--n",
        "2",
        "--mu",
        "0,1,2,3,4",
        "--seed",
        "5",
        "--samples",
        "10",
        "--suite",
        "dynamics",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let names: Vec<&str> = cert["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        vec![
            "bracket_pairs",
            "flow_drift",
            "flow_order",
            "jacobian_rank",
            "self_bracket"
        ]
    );
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env.json");
    let output = binary()
        .args([
            "verify",
            "--n",
            "2",
            "--mu",
            "0,1,2,3,4",
            "--samples",
            "10",
            "--suite",
            "curves",
            "--out",
            path.to_str().unwrap(),
        ])
        .env("PENCIL_LAB_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert["config"]["seed"], 99);
}

#[test]
fn phi_reports_one_root_less_than_the_dimension() {
    let output = run(&["phi", "--n", "3", "--mu", "0,1,2,3,4,5", "--seed", "9"]);
    assert_eq!(output.status.code(), Some(0));
    let value = stdout_json(&output);
    assert_eq!(value["roots"].as_array().unwrap().len(), 2);
    assert_eq!(value["s"].as_array().unwrap().len(), 6);
    assert_eq!(value["psi"].as_array().unwrap().len(), 3);
}

#[test]
fn phi_scaling_the_covector_scales_values_quadratically() {
    let base = run(&["phi", "--n", "2", "--mu", "0,1,2,3,4", "--seed", "3"]);
    let scaled = run(&[
        "phi", "--n", "2", "--mu", "0,1,2,3,4", "--seed", "3", "--scale", "2",
    ]);
    assert_eq!(base.status.code(), Some(0));
    assert_eq!(scaled.status.code(), Some(0));
    let a = stdout_json(&base);
    let b = stdout_json(&scaled);
    for (x, y) in a["s"]
        .as_array()
        .unwrap()
        .iter()
        .zip(b["s"].as_array().unwrap())
    {
        let xr = x[0].as_f64().unwrap();
        let xi = x[1].as_f64().unwrap();
        let yr = y[0].as_f64().unwrap();
        let yi = y[1].as_f64().unwrap();
        assert!((4.0 * xr - yr).abs() <= 1e-9 * (1.0 + yr.abs()));
        assert!((4.0 * xi - yi).abs() <= 1e-9 * (1.0 + yi.abs()));
    }
}

#[test]
fn phi_replays_its_own_sample_and_rejects_off_variety_points() {
    let sampled = run(&["phi", "--n", "2", "--mu", "0,1,2,3,4", "--seed", "8"]);
    assert_eq!(sampled.status.code(), Some(0));
    let value = stdout_json(&sampled);
    let point = serde_json::to_string(&value["point"]).unwrap();
    let xi = serde_json::to_string(&value["covector"]).unwrap();
    let replay = run(&[
        "phi", "--n", "2", "--mu", "0,1,2,3,4", "--point", &point, "--xi", &xi,
    ]);
    assert_eq!(replay.status.code(), Some(0));
    let replayed = stdout_json(&replay);
    assert_eq!(value["s"], replayed["s"]);

    let off = run(&[
        "phi",
        "--n",
        "2",
        "--mu",
        "0,1,2,3,4",
        "--point",
        "[[1,0],[1,0],[1,0],[1,0],[1,0]]",
        "--xi",
        &xi,
    ]);
    assert_eq!(off.status.code(), Some(2));
}

#[test]
fn flow_writes_csv_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let output = run(&[
        "flow",
        "--n",
        "2",
        "--mu",
        "0,1,2,3,4",
        "--seed",
        "4",
        "--steps",
        "200",
        "--record-every",
        "20",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("s,u0_re,u0_im"));
    assert!(header.contains("phi0_re"));
    assert_eq!(lines.count(), 11, "step zero plus ten recorded steps");
    let summary = String::from_utf8_lossy(&output.stdout);
    assert!(summary.contains("drift_phi0="), "summary: {summary}");
    assert!(summary.contains("drift_phi1="), "summary: {summary}");
}

#[test]
fn flow_with_zero_steps_emits_a_single_row() {
    let output = run(&[
        "flow", "--n", "2", "--mu", "0,1,2,3,4", "--seed", "4", "--steps", "0",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let csv = String::from_utf8_lossy(&output.stdout);
    assert_eq!(csv.trim().lines().count(), 2, "header plus one row");
}

#[test]
fn flow_rejects_an_out_of_range_hamiltonian_index() {
    let output = run(&[
        "flow", "--n", "2", "--mu", "0,1,2,3,4", "--h-index", "5",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn dims_prints_the_monomial_count_table() {
    let output = run(&[
        "dims", "--n", "2", "--dmax", "4", "--mu", "0,1,2,3,4", "--json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let rows = stdout_json(&output);
    let expected: Vec<u64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["expected"].as_u64().unwrap())
        .collect();
    assert_eq!(expected, vec![2, 3, 4, 5]);
    assert!(rows
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["pass"] == true && r["measured"] == r["expected"]));
}

#[test]
fn dims_strata_grid_reports_codimensions() {
    let output = run(&["dims", "--strata", "--dmax", "2", "--json"]);
    assert_eq!(output.status.code(), Some(0));
    let rows = stdout_json(&output);
    let find = |k: i64, l: i64| -> i64 {
        rows.as_array()
            .unwrap()
            .iter()
            .find(|r| r["k"] == k && r["l"] == l)
            .unwrap()["codim"]
            .as_i64()
            .unwrap()
    };
    assert_eq!(find(0, 0), 2);
    assert_eq!(find(1, 1), 4);
    assert_eq!(find(2, 0), 4);
}
