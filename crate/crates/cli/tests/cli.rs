use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn idealc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idealc")).args(args).env_remove("IDEALC_BUDGET").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SWAP: &str = r#"{"group": "Z", "points": 2, "action": {"a": [1, 0]}, "measure": [0.3333333333333333, 0.6666666666666667]}"#;

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let swap = write(dir.path(), "swap.json", SWAP);
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["pd-check", "--group", "F2", "--function", "haagerup:n=1", "--radius", "3"], 0),
        (vec!["pd-check", "--group", "F2", "--function", "wordlength", "--radius", "2"], 1),
        (vec!["cnd-check", "--group", "F2", "--radius", "2"], 0),
        (vec!["cnd-check", "--group", "F2", "--function", "haagerup:n=1", "--radius", "2"], 1),
        (vec!["ideal", "--group", "F2", "--function", "haagerup:n=1", "--ideal", "c0"], 0),
        (vec!["ideal", "--group", "F2", "--function", "haagerup:n=1", "--ideal", "cc"], 1),
        (vec!["lp-norm", "--group", "F2", "--function", "haagerup:n=1", "--p", "2"], 0),
        (vec!["lp-norm", "--group", "F2", "--function", "haagerup:n=1", "--p", "1"], 1),
        (vec!["gns", "--group", "F2", "--function", "haagerup:n=1", "--radius", "3"], 0),
        (vec!["gns", "--group", "F2", "--function", "wordlength", "--radius", "2"], 1),
        (vec!["norm-gap", "--group", "Z2", "--radius", "6", "--function", "folner:box=2"], 0),
        (vec!["certificate", "--group", "Z2", "--ideal", "cc"], 0),
        (vec!["certificate", "--group", "F2", "--ideal", "c0"], 0),
        (vec!["certificate", "--group", "F2", "--ideal", "cc"], 1),
        (vec!["certificate", "--system", "random:group=F2,points=5", "--kind", "atmenable"], 0),
        (vec!["coproduct", "--group", "Z", "--radius", "2"], 0),
        (vec!["growth", "--group", "F2", "--max-radius", "5"], 0),
        (vec!["dynamics", "--system", &swap, "--op", "summary"], 0),
        (vec!["dynamics", "--system", &swap, "--op", "cocycle"], 0),
        (vec!["dynamics", "--system", &swap, "--op", "envelopes"], 0),
        (vec!["dynamics", "--system", &swap, "--op", "spectral-gap"], 0),
        (vec!["dynamics", "--system", &swap, "--op", "pd-check", "--function", "haagerup:n=2"], 0),
        (vec!["dynamics", "--system", &swap, "--op", "pd-check", "--function", "wordlength"], 1),
        (vec!["dn-report", "--system", &swap], 0),
        (vec!["bogus"], 2),
        (vec!["pd-check", "--group", "F2"], 2),
        (vec!["pd-check", "--group", "G7", "--function", "one"], 2),
        (vec!["pd-check", "--group", "F2", "--function", "haagerup:n=-1"], 2),
        (vec!["pd-check", "--group", "F2", "--function", "one", "--psd-tol", "0"], 2),
        (vec!["dynamics", "--system", "/nonexistent.json"], 2),
    ];
    for (args, expected) in cases {
        let out = idealc(&args);
        assert_eq!(code(&out), expected, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        if expected != 2 {
            let r = report(&out);
            assert_eq!(r["schema"], 1);
            assert_eq!(r["passed"], expected == 0, "{args:?}");
        }
    }
}

#[test]
fn examples_from_the_documentation() {
    let out = idealc(&["pd-check", "--group", "F2", "--function", "haagerup:n=1", "--radius", "3"]);
    assert_eq!(code(&out), 0);
    assert!(report(&out)["report"]["min_eigenvalue"].as_f64().unwrap() >= -1e-8);

    let out = idealc(&["norm-gap", "--group", "F2", "--element", "gensum", "--radius", "12", "--ideal", "c0"]);
    let r = report(&out)["report"].clone();
    assert_eq!(r["trivial"]["value"], 4.0);
    assert!(r["reduced_upper"]["value"].as_f64().unwrap() <= 3.4642);
    assert_eq!(r["gap"], true);

    let dir = tempfile::tempdir().unwrap();
    let swap = write(dir.path(), "swap.json", SWAP);
    let out = idealc(&["dynamics", "--system", &swap, "--op", "dn-report"]);
    assert_eq!(code(&out), 0);
    let r = report(&out)["report"].clone();
    let upper: Vec<f64> = serde_json::from_value(r["envelopes"]["upper"].clone()).unwrap();
    assert!((upper[0] - 2.0).abs() < 1e-12 && (upper[1] - 1.0).abs() < 1e-12);
    assert_eq!(r["fixed_vector_exists"], true);
}

#[test]
fn identical_runs_are_byte_identical() {
    let runs: [&[&str]; 4] = [
        &["coproduct", "--group", "F2", "--radius", "1", "--seed", "7"],
        &["gns", "--group", "F2", "--function", "random:dim=3,seed=4", "--element", "a + 2b^-1", "--radius", "2"],
        &["dynamics", "--system", "random:group=Dinf,points=6", "--seed", "3", "--format", "csv"],
        &["certificate", "--system", "random:group=Z2,points=4", "--kind", "amenable", "--seed", "9"],
    ];
    for args in runs {
        let a = idealc(args);
        let b = idealc(args);
        assert_eq!(code(&a), code(&b));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn malformed_json_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"group\": \"Z\",\n \"points\": 2,\n \"action\": {\"a\": [1, 0]\n}");
    let out = idealc(&["dn-report", "--system", &bad]);
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line"), "{msg}");

    let unknown = write(dir.path(), "unknown.json", r#"{"group": "Z", "points": 2, "action": {"a": [1, 0]}, "measure": [0.5, 0.5], "extra": 1}"#);
    let msg = String::from_utf8_lossy(&idealc(&["dn-report", "--system", &unknown]).stderr).to_string();
    assert!(msg.contains("extra"), "{msg}");

    let not_perm = write(dir.path(), "perm.json", r#"{"group": "Z", "points": 2, "action": {"a": [1, 1]}, "measure": [0.5, 0.5]}"#);
    let msg = String::from_utf8_lossy(&idealc(&["dn-report", "--system", &not_perm]).stderr).to_string();
    assert!(msg.contains("action.a"), "{msg}");

    let table = write(dir.path(), "h.json", r#"{"values": {"e": 1, "a": 0.5}, "certificate": {"kind": "finite_support"}}"#);
    let out = idealc(&["pd-check", "--group", "F2", "--function", &format!("@{table}")]);
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("radius") && msg.contains("line"), "{msg}");
}

#[test]
fn function_tables_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let table = write(
        dir.path(),
        "h.json",
        r#"{"values": {"e": 1, "a": 0.25, "a^-1": 0.25}, "certificate": {"kind": "finite_support", "radius": 1}}"#,
    );
    let f = format!("@{table}");
    assert_eq!(code(&idealc(&["pd-check", "--group", "F2", "--function", &f])), 0);
    assert_eq!(code(&idealc(&["ideal", "--group", "F2", "--function", &f, "--ideal", "cc"])), 0);
}

#[test]
fn budget_is_enforced_with_predicted_size() {
    let out = idealc(&["pd-check", "--group", "F2", "--function", "one", "--radius", "3", "--budget", "20"]);
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("53"), "{msg}");
    let out = Command::new(env!("CARGO_BIN_EXE_idealc"))
        .args(["growth", "--group", "F2", "--max-radius", "3"])
        .env("IDEALC_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn csv_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = idealc(&["growth", "--group", "Z2", "--max-radius", "3", "--format", "csv", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("field,value\n"));
    assert!(text.contains("report.sphere_counts.2,12\n"), "{text}");
    assert!(text.contains("schema,1\n"));
}
