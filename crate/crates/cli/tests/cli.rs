//! End-to-end checks of the binary: JSON output, exit-code classes, batch
//! mode, and the precision environment fallback.

use std::io::Write;
use std::process::{Command, Output};

fn tdlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdlc"))
        .args(args)
        .env_remove("TDLC_PRECISION")
        .output()
        .expect("binary runs")
}

fn tdlc_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdlc"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const Q3: &str = r#"{"field":"Qp","p":3}"#;

#[test]
fn help_lists_every_subcommand() {
    let out = tdlc(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["scale", "tidy", "flat", "tree", "shift", "relprof", "examples", "batch"] {
        assert!(text.contains(name), "help misses {name}");
    }
}

#[test]
fn scale_reports_both_routes_and_the_ratio() {
    let out = tdlc(&["scale", "--field", Q3, "--matrix", "3,0;0,1/3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["command"], "scale");
    assert_eq!(v["scale"], "3");
    assert_eq!(v["polygon_scale"], "3");
    assert_eq!(v["modular_ratio"], serde_json::json!(["1", "1"]));
    assert_eq!(v["all_hold"], true);
}

#[test]
fn output_is_deterministic_across_runs() {
    let a = tdlc(&["scale", "--field", Q3, "--matrix", "9,1;0,1"]);
    let b = tdlc(&["scale", "--field", Q3, "--matrix", "9,1;0,1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn examples_catalog_passes() {
    let out = tdlc(&["examples"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all 17 example checks passed"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("ok ")).count(), 17);
}

#[test]
fn rejected_field_config_exits_class_one() {
    let bad = r#"{"field":"Qp","p":3,"bogus":1}"#;
    let out = tdlc(&["scale", "--field", bad, "--matrix", "3,0;0,1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown field"), "{err}");
}

#[test]
fn non_flat_family_exits_class_two() {
    let out = tdlc(&[
        "flat",
        "--field",
        Q3,
        "--matrix",
        "3,0;0,1/3",
        "--matrix",
        "0,1;-1,0",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not flat"));
}

#[test]
fn exhausted_window_exits_class_three() {
    let out = tdlc(&["shift", "scale", "--window", "4", "--tau", "-9"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn shift_scale_accepts_negative_tau_and_agrees_with_closed_form() {
    let out = tdlc(&["shift", "scale", "--window", "6", "--tau", "-2", "--lamps", "0,3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["scale"], "4");
    assert_eq!(v["closed_form"], "4");
}

#[test]
fn tree_classify_separates_the_three_motions() {
    for (matrix, kind, scale) in [
        ("3,0;0,1", "hyperbolic", "3"),
        ("0,1;-1,0", "elliptic", "1"),
        ("0,1;3,0", "inversion", "1"),
    ] {
        let out = tdlc(&["tree", "classify", "--field", Q3, "--matrix", matrix]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        assert_eq!(v["kind"], kind);
        assert_eq!(v["scale"], scale);
    }
}

#[test]
fn relprof_commands_report_frozen_values() {
    let out = tdlc(&["relprof", "fingerprint", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["order"], 160);
    assert_eq!(v["closed_form"], 160);

    let out = tdlc(&["relprof", "arith", "--p", "3", "--ball", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["orbit_index"], "12");
    assert_eq!(v["congruence_count"], 12);
    assert_eq!(v["sphere_count"], 12);
    assert_eq!(v["ball_counts"], serde_json::json!([1, 3, 7, 19]));

    let out = tdlc(&["relprof", "wreath"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["integers_mod_two"]["image_order"], v["integers_mod_two"]["kernel_index"]);
    assert_eq!(v["symmetric_three"]["image_order"], v["symmetric_three"]["kernel_index"]);
}

#[test]
fn batch_runs_every_job_and_keeps_the_first_failure_class() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        r#"[
            {{"job": "fingerprint", "m": 1}},
            {{"job": "fingerprint", "m": 99}},
            {{"job": "shift-scale", "window": 4, "tau": -9}}
        ]"#
    )
    .unwrap();
    let path = file.path().to_str().unwrap();
    let out = tdlc(&["batch", "--config", path]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let jobs = v.as_array().unwrap();
    assert_eq!(jobs.len(), 3);
    assert_eq!(jobs[0]["order"], 24);
    assert_eq!(jobs[1]["exit_class"], 1);
    assert_eq!(jobs[2]["exit_class"], 3);
}

#[test]
fn batch_of_good_jobs_exits_zero() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        r#"[
            {{"job": "scale", "field": {{"field": "Qp", "p": 3}}, "matrix": "9,1;0,1"}},
            {{"job": "tree-product", "field": {{"field": "Qp", "p": 2}}}},
            {{"job": "shift-scan", "window": 4}}
        ]"#
    )
    .unwrap();
    let path = file.path().to_str().unwrap();
    let out = tdlc(&["batch", "--config", path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let jobs = v.as_array().unwrap();
    assert_eq!(jobs.len(), 3);
    assert_eq!(jobs[0]["scale_inverse"], "9");
    assert_eq!(jobs[1]["scale_xy"], "4");
    assert_eq!(jobs[2]["entries"].as_array().unwrap().len(), 4);
}

#[test]
fn unknown_batch_job_key_is_rejected() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"[{{"job": "fingerprint", "m": 1, "stray": true}}]"#).unwrap();
    let path = file.path().to_str().unwrap();
    let out = tdlc(&["batch", "--config", path]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert!(v[0]["error"].as_str().unwrap().contains("unknown field"));
}

#[test]
fn precision_env_is_a_fallback_not_an_override() {
    // the env value starves the computation when the config is silent
    let out = tdlc_env(
        &["scale", "--field", Q3, "--matrix", "6561,0;0,1/6561"],
        "TDLC_PRECISION",
        "8",
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    // an explicit precision in the config wins over the env value
    let wide = r#"{"field":"Qp","p":3,"precision":64}"#;
    let out = tdlc_env(
        &["scale", "--field", wide, "--matrix", "6561,0;0,1/6561"],
        "TDLC_PRECISION",
        "8",
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["scale"], "6561");

    // a malformed env value is a configuration error
    let out = tdlc_env(&["scale", "--field", Q3, "--matrix", "3,0;0,1"], "TDLC_PRECISION", "wide");
    assert_eq!(out.status.code(), Some(1));
}
