use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn isharp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isharp")).args(args).env_remove("ISHARP_DB").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = isharp(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn first_line(args: &[&str]) -> String {
    let out = isharp(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    stdout(&out).lines().next().unwrap().to_string()
}

#[test]
fn dim_examples() {
    assert_eq!(first_line(&["dim", "T23", "5", "--field", "F2"]), "5");
    assert_eq!(first_line(&["dim", "unknot", "7/3"]), "7");
    assert_eq!(first_line(&["dim", "fig8", "0", "--field", "C", "--bundle", "mu"]), "2");
    assert_eq!(first_line(&["dim", "T(2,3)", "4", "--field", "F2"]), "6");
}

#[test]
fn dim_reports_formula() {
    let text = stdout(&isharp(&["dim", "T23", "5", "--field", "F2"]));
    assert!(text.contains("exceptional: false"));
    assert!(text.contains("1*4 + |5 - 1*4| = 5"));
    let v = json(&["dim", "T23", "5", "--field", "F2"]);
    assert_eq!(v["value"], 5);
    assert_eq!(v["knot"], "T(2,3)");
}

#[test]
fn exit_codes() {
    assert_eq!(isharp(&["dim", "nope", "1"]).status.code(), Some(2));
    assert_eq!(isharp(&["dim", "T23", "1", "--field", "Fp:3"]).status.code(), Some(2));
    assert_eq!(isharp(&["dim", "T23", "1", "--field", "Fp:4"]).status.code(), Some(2));
    let shape = isharp(&["dim", "K4", "0"]);
    assert_eq!(shape.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&shape.stderr).contains("shape required"));
    assert_eq!(isharp(&["dim", "K4", "1"]).status.code(), Some(0));
}

#[test]
fn farey_tree_of_two_thirds() {
    let text = stdout(&isharp(&["farey", "2/3"]));
    assert!(text.starts_with("2/3 -> r1=1 r2=1/2 r3=0"), "{text}");
    assert!(text.contains("1/2 -> r1=1 r2=0 r3=inf"));
    let v = json(&["farey", "2/3"]);
    assert_eq!(v["depth"], 2);
    assert_eq!(v["leaves"], serde_json::json!(["0", "1", "inf"]));
}

#[test]
fn triangle_sweep() {
    let out = isharp(&["check-triangles", "fig8", "--field", "C", "--den-max", "10"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("0 failures"));
    assert_eq!(json(&["check-triangles", "K2", "--den-max", "4"])["failures"], 0);
}

#[test]
fn grading_report() {
    let out = isharp(&["check-grading"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("0 problems"));
}

#[test]
fn su2_survivors() {
    let v = json(&["su2", "T23", "--field", "F2", "--interval", "2", "6", "--den-max", "12"]);
    let surv: Vec<&str> = v["survivors"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    for s in ["11/2", "17/3", "23/4", "29/5"] {
        assert!(surv.contains(&s), "{s} missing");
    }
    assert!(!surv.contains(&"4"));
    let table = stdout(&isharp(&["su2", "T23", "--field", "F2", "--interval", "2", "6", "--den-max", "12"]));
    let line = table.lines().last().unwrap();
    assert!(line.contains(&format!("{} survivors", surv.len())), "{line}");
}

#[test]
fn table_and_json_agree() {
    let args = ["table", "T23", "--field", "F2", "--lo", "2", "--hi", "7"];
    let v = json(&args);
    let text = stdout(&isharp(&args));
    let rows: Vec<Vec<String>> =
        text.lines().skip(2).map(|l| l.split_whitespace().map(str::to_string).collect()).collect();
    let jrows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), jrows.len());
    for (r, j) in rows.iter().zip(jrows) {
        assert_eq!(r[0], j["slope"].as_str().unwrap());
        assert_eq!(r[1], j["triv"].to_string());
        assert_eq!(r[2], j["mu"].to_string());
    }
}

const CUSTOM: &str = r#"[
  {
    "name": "Toy",
    "alexander": [1, -1, 1],
    "invariants": [{"char": 0, "nu": 2, "r": 4, "shape": "V"}]
  }
]"#;

fn db_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn custom_database() {
    let f = db_file(CUSTOM);
    let path = f.path().to_str().unwrap();
    let out = isharp(&["--db", path, "dim", "toy", "1/2"]);
    assert_eq!(stdout(&out).lines().next(), Some("11"));

    let out =
        Command::new(env!("CARGO_BIN_EXE_isharp")).args(["dim", "Toy", "2"]).env("ISHARP_DB", path).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next(), Some("4"));

    // the built-in records are not consulted when a file is given
    assert_eq!(isharp(&["--db", path, "dim", "T23", "1"]).status.code(), Some(2));
    assert!(isharp(&["db-validate", path]).status.success());
}

#[test]
fn db_validate_reports() {
    assert!(stdout(&isharp(&["db-validate"])).contains("0 violations"));

    let bad = db_file(r#"[{"name": "Bad", "alexander": [1, -1, 1], "invariants": [{"char": 0, "nu": 3, "r": 1}]}]"#);
    let out = isharp(&["db-validate", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("1 violations") || stdout(&out).contains("violation"), "{}", stdout(&out));

    let broken = db_file("[{\"name\": \"X\",\n \"alexander\": \"oops\"}]");
    let out = isharp(&["db-validate", broken.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("alexander"), "{err}");
}
