use ideal_wasm::{dn_report_json, norm_gap_json, pd_check_json, MAX_RADIUS};
use serde_json::Value;

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn pd_check_reports_window() {
    let r = parse(&pd_check_json("F2", "haagerup:n=1", 3).unwrap());
    assert_eq!(r["passed"], true);
    assert_eq!(r["report"]["size"], 53);
    let r = parse(&pd_check_json("F2", "wordlength", 2).unwrap());
    assert_eq!(r["passed"], false);
}

#[test]
fn norm_gap_on_free_group() {
    let r = parse(&norm_gap_json("F2", "gensum", 6, "c0").unwrap());
    assert_eq!(r["trivial"]["value"], 4.0);
    assert_eq!(r["gap"], true);
    assert!(r["reduced_upper"]["value"].as_f64().unwrap() <= 3.4642);
}

#[test]
fn swap_system() {
    let text = r#"{"group": "Z", "points": 2, "action": {"a": [1, 0]}, "measure": [0.3333333333333333, 0.6666666666666667]}"#;
    let r = parse(&dn_report_json(text).unwrap());
    assert_eq!(r["fixed_vector_exists"], true);
    let upper: Vec<f64> = serde_json::from_value(r["envelopes"]["upper"].clone()).unwrap();
    assert!((upper[0] - 2.0).abs() < 1e-12 && (upper[1] - 1.0).abs() < 1e-12);
}

#[test]
fn errors_are_messages() {
    assert!(pd_check_json("F2", "haagerup:n=1", MAX_RADIUS + 1).unwrap_err().contains("limit"));
    assert!(pd_check_json("nope", "one", 1).is_err());
    assert!(norm_gap_json("F2", "a +", 2, "c0").is_err());
    assert!(dn_report_json("{").unwrap_err().contains("line"));
}
