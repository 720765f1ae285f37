//! End-to-end contract tests for the binary: exit codes, report shapes, and
//! the frozen values of the bundled instances.

use std::path::PathBuf;
use std::process::{Command, Output};

fn adasub() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adasub"))
}

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../instances")
        .join(name)
}

fn run_ok(args: &[&str]) -> Output {
    let out = adasub().args(args).output().expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(0),
        "expected success, got {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_of(args: &[&str]) -> i32 {
    adasub()
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("no signal")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn pair() -> String {
    instance("two-item-coverage.json").display().to_string()
}

#[test]
fn conflicting_stop_flags_are_a_config_error() {
    assert_eq!(
        exit_of(&[
            "run",
            "--instance",
            &pair(),
            "--maximize",
            "2",
            "--cover",
            "1"
        ]),
        1
    );
    assert_eq!(exit_of(&["run", "--instance", &pair()]), 1);
}

#[test]
fn sampling_without_a_seed_is_a_config_error() {
    assert_eq!(
        exit_of(&[
            "run",
            "--instance",
            &pair(),
            "--maximize",
            "2",
            "--backend",
            "sample:100"
        ]),
        1
    );
}

#[test]
fn malformed_flags_and_missing_files_exit_one() {
    assert_eq!(
        exit_of(&["run", "--instance", &pair(), "--no-such-flag"]),
        1
    );
    assert_eq!(
        exit_of(&["run", "--instance", "/nonexistent.json", "--maximize", "1"]),
        1
    );
}

#[test]
fn unattainable_quota_exits_two() {
    assert_eq!(exit_of(&["run", "--instance", &pair(), "--cover", "3"]), 2);
}

#[test]
fn check_reports_violations_and_exits_three() {
    let surge = instance("correlated-surge.json").display().to_string();
    let out = adasub()
        .args(["check", "--instance", &surge])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(3));
    let doc = stdout_json(&out);
    assert_eq!(doc["passed"], serde_json::json!(false));
    assert_eq!(doc["monotone"]["passed"], serde_json::json!(true));
    assert_eq!(doc["submodular"]["passed"], serde_json::json!(false));
    assert!(!doc["submodular"]["witnesses"]
        .as_array()
        .unwrap()
        .is_empty());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("violation"), "stderr names the witnesses");
}

#[test]
fn oversized_requests_exit_four() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("large.json");
    adasub::corpus::random_coverage_large(3)
        .save(&path)
        .expect("save large instance");
    let large = path.display().to_string();
    assert_eq!(exit_of(&["check", "--instance", &large]), 4);
    assert_eq!(
        exit_of(&["oracle", "--instance", &large, "--maximize", "2"]),
        4
    );
}

#[test]
fn support_cap_env_var_gates_enumeration() {
    let code = adasub()
        .args(["check", "--instance", &pair()])
        .env("ADASUB_SUPPORT_CAP", "1")
        .output()
        .expect("binary runs")
        .status
        .code();
    assert_eq!(code, Some(4));
    assert_eq!(
        adasub()
            .args(["check", "--instance", &pair()])
            .env("ADASUB_SUPPORT_CAP", "junk")
            .output()
            .expect("binary runs")
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn diverging_engines_exit_five_from_bench() {
    let surge = instance("correlated-surge.json").display().to_string();
    let out = adasub()
        .args([
            "bench",
            "--instance",
            &surge,
            "--maximize",
            "2",
            "--format",
            "csv",
        ])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(5));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().last().unwrap().ends_with("false"));
}

#[test]
fn run_reports_the_frozen_pair_metrics() {
    let out = run_ok(&[
        "run",
        "--instance",
        &pair(),
        "--maximize",
        "2",
        "--engine",
        "lazy",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], serde_json::json!("adasub-run v1"));
    assert_eq!(doc["metrics"]["avg_value"], serde_json::json!(1.5));
    assert_eq!(doc["metrics"]["avg_cost"], serde_json::json!(2.0));
    assert_eq!(doc["metrics"]["evaluation_count"], serde_json::json!(3));
    assert_eq!(doc["policy"]["item"], serde_json::json!(0));
    assert!(doc["timing"]["wall_ms"].is_number());
}

#[test]
fn run_covers_the_identification_instance_at_the_known_cost() {
    let three = instance("three-hypotheses.json").display().to_string();
    let out = run_ok(&["run", "--instance", &three, "--cover", "1"]);
    let doc = stdout_json(&out);
    let avg_cost = doc["metrics"]["avg_cost"].as_f64().unwrap();
    assert!((avg_cost - 5.0 / 3.0).abs() < 1e-12);
    assert_eq!(doc["metrics"]["worst_case_cost"], serde_json::json!(2.0));
}

#[test]
fn csv_reports_open_with_the_versioned_header() {
    for args in [
        vec!["run", "--instance", &pair(), "--maximize", "2"],
        vec!["check", "--instance", &pair()],
        vec!["oracle", "--instance", &pair(), "--maximize", "2"],
        vec!["bound", "--instance", &pair(), "--maximize", "2"],
        vec!["bench", "--instance", &pair(), "--maximize", "2"],
    ] {
        let mut full = args.clone();
        full.extend(["--format", "csv"]);
        let out = run_ok(&full);
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(text.lines().next(), Some("# adasub-csv v1"), "{args:?}");
    }
}

#[test]
fn bench_counts_match_the_frozen_pair_workload() {
    let out = run_ok(&[
        "bench",
        "--instance",
        &pair(),
        "--maximize",
        "2",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    let data = text.lines().nth(2).expect("one data row");
    let fields: Vec<&str> = data.split(',').collect();
    assert_eq!(fields[2], "3", "naive evaluations");
    assert_eq!(fields[3], "3", "lazy evaluations");
    assert_eq!(fields[6], "true", "trees agree");
}

#[test]
fn bound_trace_lists_certificates_per_step() {
    let out = run_ok(&[
        "bound",
        "--instance",
        &pair(),
        "--maximize",
        "2",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[1], "step,depth,current,slack,bound,k_remaining");
    assert_eq!(rows[2], "0,0,0,1.5,1.5,2");
    assert_eq!(rows[3], "1,1,1,0.5,1.5,1");
}

#[test]
fn oracle_reports_a_unit_ratio_on_the_identification_instance() {
    let three = instance("three-hypotheses.json").display().to_string();
    let out = run_ok(&["oracle", "--instance", &three, "--cover", "1"]);
    let doc = stdout_json(&out);
    let optimum = doc["optimum"].as_f64().unwrap();
    assert!((optimum - 5.0 / 3.0).abs() < 1e-12);
    assert_eq!(doc["ratio"], serde_json::json!(1.0));
    let budget_code = exit_of(&["oracle", "--instance", &three, "--budget", "2"]);
    assert_eq!(budget_code, 1, "budget stopping has no oracle");
}

#[test]
fn reports_can_be_written_to_a_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("report.json");
    let out_path = path.display().to_string();
    run_ok(&[
        "run",
        "--instance",
        &pair(),
        "--maximize",
        "2",
        "--out",
        &out_path,
    ]);
    let text = std::fs::read_to_string(&path).expect("report written");
    let doc: serde_json::Value = serde_json::from_str(&text).expect("file is JSON");
    assert_eq!(doc["metrics"]["avg_value"], serde_json::json!(1.5));
}
