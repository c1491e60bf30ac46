use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const BOX3: &str = "box:-1,1,-1,1,-1,1";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cone-verify"));
    cmd.env_remove("CONE_VERIFY_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn lorenz_like(form: &str, samples: &str) -> Vec<String> {
    ["check-region", "--field", "linear_diag", "--params=-3,-1,2", "--form", form, "--region", BOX3, "--samples", samples]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Report text with the timing block removed.
fn without_timing(text: &str) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    serde_json::to_string_pretty(&v).unwrap() + "\n"
}

fn check_golden(name: &str, out: &Output) {
    let actual = without_timing(&String::from_utf8(out.stdout.clone()).unwrap());
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &actual).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output differs from {name}; rerun with UPDATE_GOLDEN=1 after checking the change");
}

#[test]
fn hyperbolic_fixture_passes() {
    let out = run(&lorenz_like("diag:-1,-1,1", "5").iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verdict"], "Strict");
    for s in v["samples"].as_array().unwrap() {
        assert_eq!(s["separation"]["r_minus"].as_f64().unwrap(), -2.0);
        assert_eq!(s["separation"]["r_plus"].as_f64().unwrap(), 4.0);
    }
    check_golden("j2_box.json", &out);
}

#[test]
fn non_separated_fixture_reports_a_counterexample() {
    let out = run(&lorenz_like("diag:1,-1,1", "5").iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["verdict"], "Fail");
    assert_eq!(v["counterexample"]["index"], 0);
    assert!(v["samples"][0]["separation"]["r_minus"].is_null());
    check_golden("j3_box.json", &out);
}

#[test]
fn constant_field_is_inconclusive() {
    let out = run(&[
        "check-region",
        "--field",
        "saddle_suspension_constant",
        "--form",
        "diag:-1,1",
        "--region",
        "box:-1,1,-1,1",
        "--samples",
        "4",
        "--strategy",
        "grid",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["verdict"], "NonStrict");
    assert!(v["samples"].as_array().unwrap().iter().all(|s| s["separation"]["verdict"] == "NonStrict"));
    check_golden("constant_grid.json", &out);
}

#[test]
fn partially_hyperbolic_fixture_classifies() {
    let out = run(&[
        "classify",
        "--field",
        "linear_diag",
        "--params=-3,-1,2",
        "--form",
        "diag:-1,1,1",
        "--region",
        BOX3,
        "--samples",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["splitting"]["classification"], "PartiallyHyperbolicContracting");
    assert_eq!(v["splitting"]["samples"].as_array().unwrap().len(), 3);
}

#[test]
fn identical_runs_hash_identically_across_thread_counts() {
    let args = lorenz_like("diag:-1,-1,1", "40");
    let a = bin().args(&args).env("CONE_VERIFY_THREADS", "1").output().unwrap();
    let b = bin().args(&args).env("CONE_VERIFY_THREADS", "4").output().unwrap();
    let (va, vb) = (json(&a), json(&b));
    assert_eq!(va["determinism_hash"], vb["determinism_hash"]);
    assert_eq!(without_timing(&String::from_utf8(a.stdout).unwrap()), without_timing(&String::from_utf8(b.stdout).unwrap()));
    let mut other = args.clone();
    other.extend(["--seed".to_string(), "1".to_string()]);
    assert_ne!(json(&run(&other.iter().map(String::as_str).collect::<Vec<_>>()))["determinism_hash"], va["determinism_hash"]);
}

#[test]
fn csv_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let mut args = lorenz_like("diag:-1,-1,1", "2");
    args.extend(["--format", "csv", "--out", path.to_str().unwrap()].map(String::from));
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("index,x1,x2,x3,r_minus"));
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(
        &path,
        r#"{"field": {"builtin": "linear_diag", "params": {"lambda": [-3, -1, 2]}},
            "region": {"ball": {"center": [0, 0, 0], "radius": 1}},
            "form": "diag:-1,-1,1", "samples": 6, "seed": 11}"#,
    )
    .unwrap();
    let out = run(&["check-region", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["samples"].as_array().unwrap().len(), 6);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["check-region", "--field", "nosuch", "--form", "diag:-1,1", "--region", "box:0,1,0,1"]).status.code(), Some(1));
    assert_eq!(run(&["check-region", "--field", "linear_diag", "--params=-3,-1,2", "--region", BOX3]).status.code(), Some(1));
    assert_eq!(run(&["check-point", "--field", "linear_diag", "--params=-3,-1,2", "--form", "diag:-1,-1,1"]).status.code(), Some(1));
    assert_eq!(run(&["check-region", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["check-region", "--field", "linear_diag", "--params=-3,-1,2", "--form", "diag:-1,1", "--region", BOX3]).status.code(), Some(1));
}

#[test]
fn check_point_with_expressions() {
    let out = run(&["check-point", "--expr", "a*x1; -x2 + x1^2; 2*x3", "--params", "a=-3", "--form", "diag:-1,-1,1", "--point", "0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["samples"][0]["separation"]["r_minus"].as_f64().unwrap(), -2.0);
}

#[test]
fn lpf_mode_gates_on_flow_direction() {
    let base = ["--field", "linear_diag", "--params=-3,-1,2", "--form", "diag:-1,-1,1"];
    let inside = run(&[&["lpf-check"][..], &base, &["--point", "0.1,0.1,1"]].concat());
    assert_eq!(inside.status.code(), Some(0));
    assert_eq!(json(&inside)["samples"][0]["lpf"]["verdict"], "StrictlyMonotone");
    let outside = run(&[&["check-point"][..], &base, &["--point", "1,0,0.1", "--lpf"]].concat());
    assert_eq!(outside.status.code(), Some(2));
    let singular = run(&[&["lpf-check"][..], &base, &["--point", "0,0,0"]].concat());
    assert_eq!(singular.status.code(), Some(3));
    assert_eq!(json(&singular)["verdict"], "Inconclusive");
}

#[test]
fn extracted_splitting_feeds_the_adapted_form() {
    let dir = tempfile::tempdir().unwrap();
    let split = dir.path().join("split.json");
    let out = run(&[
        "extract-splitting",
        "--field",
        "linear_diag",
        "--params=-3,-1,2",
        "--form",
        "diag:-1,1,1",
        "--region",
        BOX3,
        "--samples",
        "3",
        "--out",
        split.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let form = format!("adapted:{}", split.display());
    let out = run(&["check-region", "--field", "linear_diag", "--params=-3,-1,2", "--form", &form, "--region", BOX3, "--samples", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(run(&["check-region", "--field", "linear_diag", "--params=-3,-1,2", "--form", "adapted", "--region", BOX3]).status.code(), Some(1));
}

#[test]
fn catalog_lists_builtins() {
    let out = run(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> =
        json(&out).as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap().to_string()).collect();
    assert!(names.contains(&"lorenz".to_string()) && names.contains(&"saddle_suspension_constant".to_string()));
}

#[test]
fn report_matches_published_schema_keys() {
    let schema: Value =
        serde_json::from_str(&fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json")).unwrap())
            .unwrap();
    let out = run(&lorenz_like("diag:-1,-1,1", "2").iter().map(String::as_str).collect::<Vec<_>>());
    let v = json(&out);
    let required = schema["required"].as_array().unwrap();
    let obj = v.as_object().unwrap();
    for k in required {
        assert!(obj.contains_key(k.as_str().unwrap()), "missing {k}");
    }
    for k in obj.keys() {
        assert!(schema["properties"].get(k).is_some(), "undocumented key {k}");
    }
}
