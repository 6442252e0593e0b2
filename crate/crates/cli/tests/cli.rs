use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn carleman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carleman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn result<'a>(report: &'a Value, id: &str) -> &'a Value {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["check_id"] == id)
        .unwrap_or_else(|| panic!("no {id} result"))
}

#[test]
fn single_imaginary_zero() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "z.json", r#"{"zeros": [[0, 1]]}"#);
    let out = carleman(&["analyze-zeros", path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    let report = &r["report"];
    assert!((report["sigma"].as_f64().unwrap() - 1.0).abs() < 1e-4);
    assert_eq!(report["gamma_plus"].as_f64(), Some(1.0));
    assert!((report["alpha_p"]["1"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let t3 = result(&r, "T3_IDENTITY");
    assert_eq!(t3["passed"], true);
    assert!((t3["lhs"].as_f64().unwrap() - 2.0).abs() < 2e-3);
    assert!((t3["rhs"].as_f64().unwrap() - 2.0).abs() < 2e-3);
}

#[test]
fn real_pair_is_cartwright_of_zero_type() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "z.json", r#"{"zeros": [[1, 0], [-1, 0]]}"#);
    let r = json_of(&carleman(&["analyze-zeros", path.to_str().unwrap()]));
    assert!(r["report"]["sigma"].as_f64().unwrap().abs() < 1e-4);
    assert_eq!(r["report"]["is_cartwright"], true);
}

#[test]
fn unbalanced_zero_is_not_cartwright() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "z.json", r#"{"zeros": [[1, 0]]}"#);
    let out = carleman(&["analyze-zeros", path.to_str().unwrap(), "--samples", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["report"]["is_cartwright"], false);
    assert_eq!(r["report"]["residuals"]["alpha_divergent_1"].as_f64(), Some(1.0));
    assert!(r["not_applicable"]["T3_IDENTITY"].is_string());
    assert_eq!(r["samples"]["log_max_modulus"].as_array().unwrap().len(), 16);
}

#[test]
fn malformed_zero_sets_exit_two() {
    let dir = TempDir::new().unwrap();
    let origin = write(&dir, "o.json", r#"{"zeros": [[0, 0]]}"#);
    let broken = write(&dir, "b.json", r#"{"zeros": [[0, 1]"#);
    for p in [&origin, &broken] {
        let out = carleman(&["analyze-zeros", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn nilpotent_matrix_report() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "m.json",
        r#"{"n": 2, "entries": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}"#,
    );
    let out = carleman(&["analyze-matrix", path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["schatten"]["1"]["h"].as_f64(), Some(1.0));
    assert!(r["carleman_g"]["sigma"].as_f64().unwrap().abs() < 1e-4);
    assert_eq!(result(&r, "SAKH_EQ")["passed"], true);
    let p2 = result(&r, "P2_CASE");
    assert_eq!(p2["lhs"].as_f64(), Some(0.5));
    assert_eq!(p2["rhs"].as_f64(), Some(0.5));
    assert_eq!(result(&r, "T1_BOUND")["passed"], true);
}

#[test]
fn hermitian_matrix_has_trivial_ratio_determinant() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "m.json",
        r#"{"n": 2, "entries": [[[1, 0], [2, 1]], [[2, -1], [-3, 0]]]}"#,
    );
    let r = json_of(&carleman(&["analyze-matrix", path.to_str().unwrap()]));
    assert_eq!(r["hermitian"], true);
    assert_eq!(r["ratio_determinant_max_log"].as_f64(), Some(0.0));
    assert!(r["not_applicable"]["SAKH_EQ"].is_string());
}

#[test]
fn ragged_matrix_exits_two() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "m.json", r#"{"n": 2, "entries": [[[1, 0], [2, 1]], [[2, -1]]]}"#);
    assert_eq!(
        carleman(&["analyze-matrix", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn identity_suite_passes() {
    let out = carleman(&[
        "verify",
        "--suite",
        "identities",
        "--seed",
        "7",
        "--n",
        "50",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_of(&out);
    assert_eq!(r["config"]["seed"].as_u64(), Some(7));
    assert!(r["config"]["library_version"].is_string());
    assert!(r["config"].get("timestamp").is_none());
    assert!(r["stats"].as_array().unwrap().iter().all(|s| s["failures"] == 0));
}

#[test]
fn injected_failure_exits_one() {
    let out = carleman(&[
        "verify",
        "--suite",
        "identities",
        "--n",
        "3",
        "--inject-failure",
        "SAKH_EQ",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SAKH_EQ"));
}

#[test]
fn reports_are_byte_identical() {
    let args = [
        "verify",
        "--suite",
        "inequalities",
        "--seed",
        "3",
        "--n",
        "4",
        "--no-timestamp",
    ];
    let a = carleman(&args);
    let b = carleman(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timestamp_present_by_default() {
    let r = json_of(&carleman(&["ensemble", "--check", "SAKH_EQ", "--n", "2"]));
    assert!(r["config"]["timestamp"].is_u64());
}

#[test]
fn constants_carry_pichorides_reference() {
    let out = carleman(&["constants", "--p", "2,1.3333333333333333", "--n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["p", "check_id", "ratio_max", "reference"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let reference = |p: f64| -> f64 {
        let row = rows
            .iter()
            .find(|r| (r[0].parse::<f64>().unwrap() - p).abs() < 1e-12)
            .unwrap();
        row[3].parse().unwrap()
    };
    assert!((reference(2.0) - 1.0).abs() < 1e-15);
    assert!((reference(4.0 / 3.0) - (3.0 * PI / 8.0).tan()).abs() < 1e-14);
    for r in &rows {
        if r[1] == *"MATSAEV_RATIO" && r[0].parse::<f64>().unwrap() == 2.0 {
            assert!(r[2].parse::<f64>().unwrap() <= 2.0);
        }
    }
}

#[test]
fn empty_p_list_gives_header_only() {
    let out = carleman(&["constants", "--p", ""]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "p,check_id,ratio_max,reference"
    );
}

#[test]
fn csv_columns_are_check_prefixed() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("r.csv");
    let out = carleman(&[
        "ensemble",
        "--check",
        "GK61",
        "--n",
        "5",
        "--p",
        "1.5",
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.contains("GK61@p=1.5.ratio_max"), "{header}");
    assert!(header.contains("config.seed"));
}

#[test]
fn numbers_use_seventeen_significant_digits() {
    let out = carleman(&["ensemble", "--check", "COS_INEQ", "--n", "1", "--p", "1.5"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"p\": 1.5000000000000000e0"), "{text}");
}

#[test]
fn bad_requests_exit_two() {
    assert_eq!(
        carleman(&["ensemble", "--check", "T4_RATIO", "--p", "2.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        carleman(&["ensemble", "--check", "T3_IDENTITY", "--generator", "traceless:4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(carleman(&["ensemble", "--check", "NOPE"]).status.code(), Some(2));
    assert_eq!(carleman(&["verify", "--tol", "NOPE=1"]).status.code(), Some(2));
}

#[test]
fn tolerance_override_is_recorded() {
    let r = json_of(&carleman(&[
        "ensemble",
        "--check",
        "SAKH_EQ",
        "--n",
        "2",
        "--tol",
        "SAKH_EQ=1e-3",
    ]));
    assert_eq!(r["config"]["tolerances"]["SAKH_EQ"].as_f64(), Some(1e-3));
    assert_eq!(
        r["stats"][0]["per_instance"][0]["result"]["tolerance"].as_f64(),
        Some(1e-3)
    );
}
