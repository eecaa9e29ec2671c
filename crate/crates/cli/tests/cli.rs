//! Behavior of the binary itself: exit codes, file outputs, overrides,
//! and the report format.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_frameweave")
}

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn run_in(dir: &Path, command: &str, config: &str, extra: &[&str]) -> Output {
    let config = config_dir().join(config);
    let mut args = vec![
        command.to_string(),
        "--config".into(),
        config.to_string_lossy().into_owned(),
        "--out".into(),
        dir.to_string_lossy().into_owned(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    Command::new(bin()).args(&args).output().unwrap()
}

#[test]
fn certified_run_exits_zero_and_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "bounds", "dyadic.toml", &["--grid", "512"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("bounds-report.json").exists());
    assert!(dir.path().join("bounds-curve.csv").exists());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("wall time"), "{stdout}");
}

#[test]
fn failed_density_gate_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "density-gate", "gabor-overdense.toml", &[]);
    assert_eq!(out.status.code(), Some(2));
    let report =
        std::fs::read_to_string(dir.path().join("density-gate-report.json")).unwrap();
    assert!(report.contains("abN = 1.333 > 1"), "{report}");
    assert!(report.contains("\"status\": \"not-certified\""));
}

#[test]
fn malformed_config_names_the_offending_key_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "[generator]\nkind = \"powerlaw\"\nalpha = 0.5\ncutoff = 1.0\nbogus_key = 3\n",
    )
    .unwrap();
    let out = run(&[
        "bounds",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("bogus_key"), "{stderr}");
}

#[test]
fn missing_config_file_exits_one() {
    let out = run(&["bounds", "--config", "/nonexistent/nothing.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_not_two() {
    let out = run(&["bounds"]); // --config is required
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["no-such-command", "--config", "x.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn curve_rows_match_the_grid_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "bounds", "dyadic.toml", &["--grid", "257"]);
    assert_eq!(out.status.code(), Some(0));
    let curve = std::fs::read_to_string(dir.path().join("bounds-curve.csv")).unwrap();
    // Header plus exactly one row per grid point.
    assert_eq!(curve.lines().count(), 258);
    assert_eq!(curve.lines().next(), Some("gamma,m"));

    let out = run_in(dir.path(), "weave-certify", "dyadic.toml", &["--grid", "257"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let curve =
        std::fs::read_to_string(dir.path().join("weave-certify-curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 258);
}

#[test]
fn report_round_trips_through_a_json_parser() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "bounds", "dyadic.toml", &["--grid", "512"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("bounds-report.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();

    assert_eq!(parsed["command"], "bounds");
    assert_eq!(parsed["inputs"]["system"]["n"], 2);
    let results = &parsed["results"];
    // 17 significant digits carry every f64 bit pattern through the parser.
    let a = results["a_num"].as_f64().unwrap();
    let b = results["b_num"].as_f64().unwrap();
    assert!((a - 2.0 / 3.0).abs() < 1e-3);
    assert!((b - 8.0 / 3.0).abs() < 1e-3);
    assert_eq!(results["chain"]["ordered"], true);

    // Chain entries parse back to the exact floats printed elsewhere in
    // the report: no precision is lost in rendering.
    let entries = results["chain"]["entries"].as_array().unwrap();
    let by_name = |name: &str| {
        entries
            .iter()
            .find(|e| e["name"] == name)
            .and_then(|e| e["value"].as_f64())
            .unwrap()
    };
    assert_eq!(by_name("a_num"), a);
    assert_eq!(by_name("b_num"), b);
    assert_eq!(by_name("a_analytic"), results["a_analytic"].as_f64().unwrap());
}

#[test]
fn seed_override_changes_sampled_patterns() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    // Containment needs a reasonably fine sweep; 1024 matches the slack.
    let args: &[&str] = &["--grid", "1024"];
    let out = run_in(dir_a.path(), "weave-sample", "dyadic.toml", args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run_in(
        dir_b.path(),
        "weave-sample",
        "dyadic.toml",
        &["--grid", "1024", "--seed", "99"],
    );
    assert_eq!(out.status.code(), Some(0));
    let a = std::fs::read_to_string(dir_a.path().join("weave-sample-report.json")).unwrap();
    let b = std::fs::read_to_string(dir_b.path().join("weave-sample-report.json")).unwrap();
    assert_ne!(a, b);
    let parsed: serde_json::Value = serde_json::from_str(&b).unwrap();
    assert_eq!(parsed["seed"], 99);
}

#[test]
fn thread_cap_is_honored_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_dir().join("dyadic.toml");
    let ok = Command::new(bin())
        .args(["bounds", "--config"])
        .arg(&config)
        .args(["--out", dir.path().to_str().unwrap(), "--grid", "256"])
        .env("FRAMEWEAVE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let bad = Command::new(bin())
        .args(["bounds", "--config"])
        .arg(&config)
        .args(["--out", dir.path().to_str().unwrap()])
        .env("FRAMEWEAVE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let stderr = String::from_utf8(bad.stderr).unwrap();
    assert!(stderr.contains("FRAMEWEAVE_THREADS"), "{stderr}");
}

#[test]
fn fusion_demo_and_counterexample_run_from_the_shipped_configs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "fusion-demo", "fusion.toml", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("fusion-demo-report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["results"]["is_fusion_frame"], true);
    assert_eq!(report["results"]["method"], "dense-eigen");

    let out = run_in(dir.path(), "counterexample", "counterexample.toml", &[]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("counterexample-report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["results"]["ratio_equals_m"], true);
    assert_eq!(report["results"]["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn erasure_and_reconstruct_certify_from_the_shipped_configs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "erasure", "erasure.toml", &["--grid", "512"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("erasure-report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["results"]["inside_weave"], true);
    assert!(report["results"]["rel_error"].as_f64().unwrap() <= 1e-10);

    let out = run_in(dir.path(), "reconstruct", "dyadic.toml", &["--grid", "512"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("reconstruct-report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["results"]["all_within_tol"], true);
}
