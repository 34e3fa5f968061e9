//! The `pbp` binary: exit statuses, diagnostics and output formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn pbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn singleton() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances/singleton.json")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

/// A random desk instance written into `dir`.
fn random_instance(dir: &TempDir, seed: u64, delay: usize) -> PathBuf {
    let path = dir.path().join(format!("problem-{seed}-{delay}.json"));
    let out = pbp(&[
        "random-gen",
        "--seed",
        &seed.to_string(),
        "--delay",
        &delay.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    path
}

#[test]
fn validate_accepts_the_singleton() {
    let out = pbp(&["validate", "--problem", singleton().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["command"], "validate");
    assert_eq!(report["result"]["valid"], true);
    assert_eq!(report["instance_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn bad_row_sum_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let mut spec: Value = serde_json::from_str(&std::fs::read_to_string(singleton()).unwrap()).unwrap();
    spec["initial_dist"] = serde_json::json!([0.7]);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = pbp(&["validate", "--problem", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let diag = stderr_json(&out);
    assert_eq!(diag["kind"], "row-sum");
    assert_eq!(diag["exit_code"], 1);
}

#[test]
fn unknown_fields_and_missing_files_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let mut spec: Value = serde_json::from_str(&std::fs::read_to_string(singleton()).unwrap()).unwrap();
    spec["extra"] = Value::Bool(true);
    let path = dir.path().join("extra.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = pbp(&["validate", "--problem", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["kind"], "parse");

    let missing = dir.path().join("missing.json");
    let out = pbp(&["solve", "--problem", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["kind"], "io");

    let out = pbp(&["solve"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn random_gen_is_reproducible() {
    let a = pbp(&["random-gen", "--seed", "7"]);
    let b = pbp(&["random-gen", "--seed", "7"]);
    let c = pbp(&["random-gen", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let spec = stdout_json(&a);
    assert_eq!(spec["horizon"], 3);
    assert_eq!(spec["num_controllers"], 2);
    let bad = pbp(&["random-gen", "--delay", "5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stderr_json(&bad)["kind"], "delay");
}

#[test]
fn solve_reports_a_verified_tuple() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 3, 2);
    let out = pbp(&["solve", "--problem", problem.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    let result = &report["result"];
    assert_eq!(result["pbp"]["converged"], true);
    assert_eq!(result["verification"]["holds"], true);
    assert_eq!(result["value_tables"].as_array().unwrap().len(), 2);
    assert_eq!(report["settings"]["tie_break"], "lowest action index");
}

#[test]
fn solve_records_skipped_verification() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 3, 1);
    let out = pbp(&["solve", "--problem", problem.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["result"]["verification"]["skipped"], "budget");
}

#[test]
fn verify_rejects_a_perturbed_tuple() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 5, 1);
    let problem = problem.to_str().unwrap();
    let solved = stdout_json(&pbp(&["solve", "--problem", problem]));
    let mut tuple = solved["result"]["pbp"]["strategies"].clone();
    let path = dir.path().join("tuple.json");
    std::fs::write(&path, tuple.to_string()).unwrap();
    let out = pbp(&["verify", "--problem", problem, "--strategies", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["result"]["holds"], true);

    // flip every first-epoch action of controller 0
    let table = &solved["result"]["value_tables"][0]["epochs"][0];
    let actions = tuple["strategies"][0]["epochs"][0].as_array_mut().unwrap();
    for (code, a) in actions.iter_mut().enumerate() {
        assert!(table["reachable"][code].as_bool().unwrap());
        *a = Value::from(1 - a.as_u64().unwrap());
    }
    std::fs::write(&path, tuple.to_string()).unwrap();
    let out = pbp(&["verify", "--problem", problem, "--strategies", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["result"]["holds"], false);
    let diag = stderr_json(&out);
    assert_eq!(diag["kind"], "verification");
    assert!(diag["detail"]["strategy"].is_object());
}

#[test]
fn verify_over_budget_exits_three() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 4, 1);
    let problem = problem.to_str().unwrap();
    let solved = stdout_json(&pbp(&["solve", "--problem", problem]));
    let path = dir.path().join("tuple.json");
    std::fs::write(&path, solved["result"]["pbp"]["strategies"].to_string()).unwrap();
    let out = pbp(&["verify", "--problem", problem, "--strategies", path.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["kind"], "budget-exceeded");
}

#[test]
fn malformed_strategies_are_rejected() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 4, 1);
    let path = dir.path().join("tuple.json");
    // right shape on the wire, wrong number of epochs
    std::fs::write(&path, r#"{"strategies":[{"controller":0,"epochs":[[0]]},{"controller":1,"epochs":[[0]]}]}"#)
        .unwrap();
    let out = pbp(&[
        "verify",
        "--problem",
        problem.to_str().unwrap(),
        "--strategies",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["kind"], "strategy");
}

#[test]
fn best_response_needs_a_controller() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 6, 1);
    let problem = problem.to_str().unwrap();
    assert_eq!(pbp(&["best-response", "--problem", problem]).status.code(), Some(1));
    assert_eq!(
        pbp(&["best-response", "--problem", problem, "--controller", "2"]).status.code(),
        Some(1)
    );
    let out = pbp(&["best-response", "--problem", problem, "--controller", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let result = &stdout_json(&out)["result"];
    assert_eq!(result["controller"], 1);
    assert!(result["payoff"].is_f64());
}

#[test]
fn csv_outputs_have_headers() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 2, 2);
    let problem = problem.to_str().unwrap();
    let first_line = |args: &[&str]| {
        let out = pbp(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        String::from_utf8(out.stdout).unwrap().lines().next().unwrap().to_string()
    };
    assert_eq!(
        first_line(&["filters", "--problem", problem, "--format", "csv"]),
        "kind,t,controller,code,index,probability"
    );
    assert!(first_line(&["solve", "--problem", problem, "--format", "csv"]).starts_with("controller,"));
    assert!(first_line(&["best-response", "--problem", problem, "--controller", "0", "--format", "csv"])
        .starts_with("controller,"));
    assert!(first_line(&["oracle-compare", "--problem", problem, "--format", "csv"]).starts_with("seed,delay,"));
}

#[test]
fn filters_dump_every_kind() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 2, 1);
    let out = pbp(&["filters", "--problem", problem.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_json(&out)["result"].as_array().unwrap().clone();
    for kind in ["xi", "pi", "theta"] {
        assert!(rows.iter().any(|r| r["kind"] == kind), "{kind}");
    }
    for row in &rows {
        let sum: f64 = row["probs"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
}

#[test]
fn oracle_compare_passes_on_one_instance() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 9, 2);
    let out = pbp(&["oracle-compare", "--problem", problem.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["result"]["all_pass"], true);
}

#[test]
fn output_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let problem = random_instance(&dir, 1, 1);
    let problem = problem.to_str().unwrap();
    let path = dir.path().join("report.json");
    let direct = pbp(&["solve", "--problem", problem]);
    let written = pbp(&["solve", "--problem", problem, "--out", path.to_str().unwrap()]);
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}
