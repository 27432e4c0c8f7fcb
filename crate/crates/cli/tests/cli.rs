use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dualsim(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualsim"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("DUALSIM_SEED")
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn zero_replications_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dualsim(dir.path(), &["--replications", "0", "run"]);
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn unknown_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!dualsim(dir.path(), &["run", "--speed", "2"])
        .status
        .success());
}

#[test]
fn run_writes_summaries_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dualsim(
        dir.path(),
        &[
            "--replications",
            "5",
            "run",
            "--engine",
            "abs",
            "--scenario",
            "2",
            "--trace",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in [
        "run_abs_s2.csv",
        "run_abs_s2.json",
        "trace_abs_s2_r0.csv",
        "customers_abs_s2_r0.csv",
    ] {
        let path = dir.path().join(name);
        assert!(path.exists(), "{name}");
        assert!(
            stdout.contains(&format!("wrote {}", path.display())),
            "{name} not announced"
        );
    }
    let csv = std::fs::read_to_string(dir.path().join("run_abs_s2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    let trace = std::fs::read_to_string(dir.path().join("trace_abs_s2_r0.csv")).unwrap();
    assert!(trace.lines().next().unwrap().contains("agent_state"));
}

#[test]
fn validate_without_observed_data_is_not_evaluable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dualsim(dir.path(), &["--replications", "20", "validate"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&dir.path().join("validation_s1.json"));
    for h in ["ho_a", "ho_b", "ho_c", "ho_d", "ho_e", "ho_f"] {
        assert_eq!(report["hypotheses"][h], "not_evaluable", "{h}");
    }
    assert!(
        report["des_vs_abs"]["mann_whitney"]["p_value"]
            .as_f64()
            .unwrap()
            > 0.0
    );
    assert!(report["des_vs_observed"].is_null());
}

#[test]
fn validate_against_shifted_observations_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let observed = dir.path().join("observed.csv");
    let mut text = String::from("wait_minutes\n");
    for i in 0..40 {
        text.push_str(&format!("{}\n", 30.0 + f64::from(i) * 0.1));
    }
    std::fs::write(&observed, text).unwrap();
    let out = dualsim(
        &dir.path().join("out"),
        &[
            "--replications",
            "20",
            "validate",
            "--observed",
            observed.to_str().unwrap(),
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&dir.path().join("out/validation_s1.json"));
    assert_eq!(report["hypotheses"]["ho_c"], "rejected");
    assert_eq!(report["hypotheses"]["ho_d"], "rejected");
}

#[test]
fn compare_both_writes_two_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dualsim(
        dir.path(),
        &[
            "--replications",
            "10",
            "--seed",
            "3",
            "--format",
            "json",
            "compare",
        ],
    );
    assert!(out.status.success());
    let listing: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(listing["command"], "compare");
    assert_eq!(listing["files"].as_array().unwrap().len(), 3);
    let des = json(&dir.path().join("compare_des.json"));
    let abs = json(&dir.path().join("compare_abs.json"));
    assert_eq!(des["engine"], "DES");
    assert_eq!(abs["engine"], "ABS");
    assert_eq!(des["per_comparison_alpha"], 0.025);
    assert_eq!(des["master_seed"], 3);
}

#[test]
fn seed_from_environment_unless_flag_given() {
    let run = |env: Option<&str>, flag: Option<&str>| -> Value {
        let dir = tempfile::tempdir().unwrap();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dualsim"));
        cmd.arg("--out")
            .arg(dir.path())
            .args(["--replications", "2"]);
        cmd.env_remove("DUALSIM_SEED");
        if let Some(v) = env {
            cmd.env("DUALSIM_SEED", v);
        }
        if let Some(v) = flag {
            cmd.args(["--seed", v]);
        }
        assert!(cmd
            .args(["compare", "--engine", "des"])
            .output()
            .unwrap()
            .status
            .success());
        json(&dir.path().join("compare_des.json"))["master_seed"].clone()
    };
    assert_eq!(run(None, None), 42);
    assert_eq!(run(Some("7"), None), 7);
    assert_eq!(run(Some("7"), Some("9")), 9);
}

#[test]
fn json_errors_go_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema_version": 1, "surprise": true}"#).unwrap();
    let out = dualsim(
        dir.path(),
        &[
            "--config",
            bad.to_str().unwrap(),
            "--format",
            "json",
            "compare",
        ],
    );
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(!err["error"].as_str().unwrap().is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn semantic_config_errors_are_all_reported() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/configs/default.json"
    ))
    .unwrap()
    .replace("\"help_probability\": 0.1", "\"help_probability\": 1.5")
    .replacen("\"job2\": \"staff1\", ", "", 1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, text).unwrap();
    let out = dualsim(dir.path(), &["--config", bad.to_str().unwrap(), "run"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("help_probability"), "{stderr}");
    assert!(stderr.contains("job2"), "{stderr}");
}

#[test]
fn calibrate_writes_a_loadable_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dualsim(
        dir.path(),
        &["--replications", "30", "calibrate", "--budget", "5"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result = json(&dir.path().join("calibration.json"));
    assert!(result["evaluations"].as_u64().unwrap() <= 5);
    let fitted = dir.path().join("calibrated_config.json");
    let again = dualsim(
        &dir.path().join("again"),
        &[
            "--config",
            fitted.to_str().unwrap(),
            "--replications",
            "2",
            "run",
        ],
    );
    assert!(again.status.success());
}

#[test]
fn arrivals_check_reports_each_hour() {
    let dir = tempfile::tempdir().unwrap();
    let out = dualsim(dir.path(), &["--replications", "200", "arrivals-check"]);
    assert!(out.status.success());
    let c = json(&dir.path().join("arrivals_check.json"));
    assert_eq!(c["buckets"].as_array().unwrap().len(), 8);
}
