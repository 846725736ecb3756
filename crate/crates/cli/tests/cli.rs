//! End-to-end tests of the `misinfo` binary: exit codes, output files, the
//! documented JSON schemas, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn misinfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_misinfo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

/// Minimal structural validator for the draft-07 subset our schemas use:
/// required fields, per-property types, additionalProperties: false.
fn check_schema(schema_path: &str, doc: &Value) {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let obj = doc.as_object().expect("document is an object");
    for req in schema["required"].as_array().unwrap() {
        assert!(
            obj.contains_key(req.as_str().unwrap()),
            "missing required field {req}"
        );
    }
    let props = schema["properties"].as_object().unwrap();
    if schema["additionalProperties"] == Value::Bool(false) {
        for key in obj.keys() {
            assert!(props.contains_key(key), "unexpected field {key}");
        }
    }
    for (key, spec) in props {
        if let Some(value) = obj.get(key) {
            let ok = match spec["type"].as_str().unwrap() {
                "number" => value.is_number(),
                "boolean" => value.is_boolean(),
                "array" => value.is_array(),
                "object" => value.is_object(),
                "string" => value.is_string(),
                other => panic!("unhandled schema type {other}"),
            };
            assert!(ok, "field {key} has wrong type: {value}");
        }
    }
}

fn schema_path(name: &str) -> String {
    format!("{}/../../schemas/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn design_report_reproduces_hand_solved_instance() {
    let out = misinfo(&["design-report", "--x-s", "1,0", "--x-t", "1,0", "--epsilon", "0.2"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    check_schema(&schema_path("design_report.schema.json"), &doc);

    let y = doc["y_star"].as_array().unwrap();
    assert!((y[0].as_f64().unwrap() - 1.2).abs() < 1e-6);
    assert!(y[1].as_f64().unwrap().abs() < 1e-6);
    assert!((doc["lambda_star"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
    assert_eq!(doc["binding"], Value::Bool(true));
    assert_eq!(doc["admissible"], Value::Bool(true));
}

#[test]
fn design_report_with_loose_filter_is_unconstrained() {
    let out = misinfo(&["design-report", "--x-s", "1,0", "--x-t", "1,0", "--epsilon", "10"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["binding"], Value::Bool(false));
    assert_eq!(doc["lambda_star"].as_f64().unwrap(), 0.0);
    let y = doc["y_star"].as_array().unwrap();
    assert!((y[0].as_f64().unwrap() - 1.5).abs() < 1e-9);
}

#[test]
fn malformed_vector_exits_2_and_names_the_field() {
    let out = misinfo(&["design-report", "--x-s", "1,0,3", "--x-t", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--x-s"), "{stderr}");

    let out = misinfo(&["design-report", "--x-s", "1,zebra", "--x-t", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--x-s"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sede = 42\n");
    let out = misinfo(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_csv_structure_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n_draws = 10\n[scenario]\nn_viewers = 20\n[epsilon_grid]\nstart = 0.5\nstop = 1.0\nstep = 0.5\n",
    );
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = misinfo(&["sweep", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(out_a.join("sweep.csv")).unwrap();
    let b = std::fs::read(out_b.join("sweep.csv")).unwrap();
    assert_eq!(a, b, "identical configs must produce byte-identical CSV");

    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon,true_mean,true_std,false_mean,false_std");
    assert_eq!(lines.len(), 3, "header plus one row per grid point");

    // A different seed changes the bytes.
    let out_c = dir.path().join("c");
    let out = misinfo(&[
        "sweep", "--config", &cfg, "--out", out_c.to_str().unwrap(), "--seed", "1",
    ]);
    assert!(out.status.success());
    let c = std::fs::read(out_c.join("sweep.csv")).unwrap();
    assert_ne!(text.as_bytes(), c.as_slice());
}

#[test]
fn sweep_true_curve_stays_below_false_curve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n_draws = 50\n[scenario]\nn_viewers = 50\n[epsilon_grid]\nstart = 0.3\nstop = 2.7\nstep = 0.6\n",
    );
    let out = misinfo(&["sweep", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    for line in text.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(
            cells[1] <= cells[3] + 1e-6,
            "true_mean {} above false_mean {}",
            cells[1],
            cells[3]
        );
    }
}

#[test]
fn svg_flag_renders_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n_draws = 5\n[scenario]\nn_viewers = 10\n[epsilon_grid]\nstart = 0.5\nstop = 1.0\nstep = 0.5\n",
    );
    let out = misinfo(&[
        "sweep", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--svg",
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(dir.path().join("sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("#1f77b4") && svg.contains("#d62728"));
}

#[test]
fn optimize_policy_outputs_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n_draws = 30\n[scenario]\nn_viewers = 20\n[epsilon_grid]\nstart = 0.5\nstop = 2.0\nstep = 0.5\n",
    );
    let out = misinfo(&[
        "optimize-policy", "--config", &cfg, "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    check_schema(&schema_path("summary.schema.json"), &summary);
    let eps_star = summary["epsilon_star"].as_f64().unwrap();
    assert!(eps_star.is_finite());

    let text = std::fs::read_to_string(dir.path().join("utility.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon,u1,u2,total,u1_pass_delta,u2_pass_alpha");
    assert_eq!(lines.len(), 5);
}

#[test]
fn optimize_policy_beta_zero_total_equals_u1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n_draws = 20\n[scenario]\nn_viewers = 10\n[policy]\nbeta = 0.0\n[epsilon_grid]\nstart = 0.5\nstop = 1.5\nstep = 0.5\n",
    );
    let out = misinfo(&[
        "optimize-policy", "--config", &cfg, "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("utility.csv")).unwrap();
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[1], cells[3], "with beta = 0 total must equal u1");
    }
}

#[test]
fn optimize_policy_single_point_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n_draws = 10\n[scenario]\nn_viewers = 10\n[epsilon_grid]\nstart = 0.9\nstop = 1.0\nstep = 0.5\n",
    );
    let out = misinfo(&[
        "optimize-policy", "--config", &cfg, "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["epsilon_star"].as_f64().unwrap(), 0.9);
}

#[test]
fn infeasible_margin_fails_with_explanation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n_draws = 5\n[scenario]\nn_viewers = 5\n[policy]\nd_min = 2.5\n[epsilon_grid]\nstart = 0.5\nstop = 1.0\nstep = 0.5\n",
    );
    let out = misinfo(&[
        "optimize-policy", "--config", &cfg, "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rejection"));
}

#[test]
fn unwritable_output_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub");
    let cfg = write_config(
        dir.path(),
        "n_draws = 5\n[scenario]\nn_viewers = 5\n[epsilon_grid]\nstart = 0.5\nstop = 1.0\nstep = 0.5\n",
    );
    let out = misinfo(&["sweep", "--config", &cfg, "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_exit_codes() {
    let out = misinfo(&["validate", "--instances", "0"]);
    assert_eq!(out.status.code(), Some(0));

    let out = misinfo(&["validate", "--instances", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches(" pass").count(), 4);

    // Negative control: a corrupted multiplier must be caught.
    let out = misinfo(&["validate", "--instances", "4", "--inject-bug"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("replay"));
}
