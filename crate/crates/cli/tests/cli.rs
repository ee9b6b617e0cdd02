use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szego-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("SZEGO_LAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

fn csv_rows(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn curve_csv_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["curve", "--t", "0.1", "--resolution", "512"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&dir.path().join("curve.csv"));
    assert_eq!(header, ["theta", "re", "im", "level_residual"]);
    assert_eq!(rows.len(), 512);
    for row in &rows {
        let res: f64 = row[3].parse().unwrap();
        assert!(res < 1e-12);
    }
    let meta = read_json(&dir.path().join("curve.csv.meta.json"));
    assert_eq!(meta["schema"], "szego-lab/1");
    assert_eq!(meta["rows"], 512);
    assert_eq!(meta["command_line"][0], "curve");
    assert!(meta["version"].is_string());
}

#[test]
fn moments_series_and_contour_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["moments", "--t", "0.4", "--kmin", "-5", "--kmax", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = csv_rows(&dir.path().join("moments.csv"));
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][0], "-5");
    for row in &rows {
        let delta: f64 = row[4].parse().unwrap();
        assert!(delta < 1e-8, "{row:?}");
    }
}

#[test]
fn penner_summary_reciprocal_sum() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["penner", "--n", "10", "--g", "0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&dir.path().join("penner.csv"));
    assert_eq!(header, ["n", "g", "re", "im", "residual"]);
    assert_eq!(rows.len(), 10);
    let summary = read_json(&dir.path().join("penner.csv.summary.json"));
    let cfg = &summary["summary"]["configs"][0];
    let re = cfg["recip_sum"][0].as_f64().unwrap();
    let im = cfg["recip_sum"][1].as_f64().unwrap();
    assert!((re + 10.0).abs() < 1e-10 && im.abs() < 1e-10);
    assert!(cfg["newton_match_distance"].as_f64().unwrap() < 1e-8);
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["zeros", "--kind", "rate-t", "--param", "0.4", "--n", "12,24"];
    for d in [&a, &b] {
        assert!(lab(d.path(), &args).status.success());
    }
    for f in ["zeros.csv", "zeros.csv.meta.json", "zeros.csv.summary.json"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn json_format_carries_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["trajectory", "--t", "0.4", "--format", "json", "--out", "tr.json"]);
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("tr.json"));
    assert_eq!(doc["schema"], "szego-lab/1");
    assert_eq!(doc["command"], "trajectory");
    assert_eq!(doc["summary"]["winding"], 1);
    assert!(doc["summary"]["closure_gap"].as_f64().unwrap() < 1e-6);
    assert!(dir.path().join("tr.json.meta.json").exists());
}

#[test]
fn default_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("data");
    std::fs::create_dir(&target).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_szego-lab"))
        .args(["cuts", "--t", "1", "--resolution", "16"])
        .current_dir(dir.path())
        .env("SZEGO_LAB_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("cuts.csv").exists());
    let summary = read_json(&target.join("cuts.csv.summary.json"));
    let x2 = summary["summary"]["x2"].as_f64().unwrap();
    assert!((x2 - 4.505241495792883).abs() < 1e-12);
}

fn error_of(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stderr);
    let last = line.lines().last().expect("error line");
    serde_json::from_str(last).expect("stderr ends with JSON")
}

#[test]
fn failures_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], i32, &str); 5] = [
        (&["bogus"], 2, "usage"),
        (&["curve", "--t", "-1"], 3, "invalid_parameter"),
        (&["curve", "--resolution", "8"], 3, "invalid_parameter"),
        (&["moments", "--tol", "nope=1"], 3, "invalid_parameter"),
        (&["curve", "--out", "missing/dir/c.csv"], 4, "io"),
    ];
    for (args, code, kind) in cases {
        let out = lab(dir.path(), args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let err = error_of(&out);
        assert_eq!(err["error"]["kind"], kind);
        assert_eq!(err["error"]["exit_code"], code);
    }
}

#[test]
fn numerical_failure_reports_code_five() {
    let dir = tempfile::tempdir().unwrap();
    // the trajectory through x0 at t = 0 runs into the corner z = 1
    let out = lab(dir.path(), &["trajectory", "--t", "0"]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(error_of(&out)["error"]["kind"], "numeric");
}

#[test]
fn help_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("trajectory"));
}
