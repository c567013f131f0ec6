use robust_contracts_web::{ratio_curve_json, solve_json};
use serde_json::Value;

#[test]
fn solves_a_single_agent_document() {
    let out = solve_json(r#"{"kind": "single", "actions": [{"outcomes": [[1.0, 1.0]], "cost": 0.5}]}"#).unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "single");
    assert!((v["value"].as_f64().unwrap() - 0.186682308851).abs() < 1e-9);
    let cdf = v["cdf"].as_array().unwrap();
    assert_eq!(cdf.len(), 101);
    assert_eq!(cdf[100][1].as_f64().unwrap(), 1.0);
}

#[test]
fn solves_a_team_document() {
    let text = r#"{"kind": "team",
        "agents": [{"costs": [0.0, 0.08]}, {"costs": [0.0, 0.02]}],
        "profiles": [{"actions": [0, 0], "outcomes": [[0.0, 1.0]]}, {"actions": [1, 0], "outcomes": [[0.0, 1.0]]},
                     {"actions": [0, 1], "outcomes": [[0.0, 1.0]]}, {"actions": [1, 1], "outcomes": [[1.0, 1.0]]}]}"#;
    let v: Value = serde_json::from_str(&solve_json(text).unwrap()).unwrap();
    assert_eq!(v["alpha_star"].as_array().unwrap().len(), 2);
    assert!((v["value"].as_f64().unwrap() - 0.46361990803496).abs() < 1e-9);
}

#[test]
fn reports_errors_as_text() {
    let err = solve_json(r#"{"kind": "single", "actions": []}"#).unwrap_err();
    assert!(err.contains("non-trivial"), "{err}");
    assert!(ratio_curve_json(0.0, 0.5, 0.1).is_err());
}

#[test]
fn ratio_curve_rows() {
    let v: Value = serde_json::from_str(&ratio_curve_json(0.1, 0.9, 0.1).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert!((rows[4]["ratio"].as_f64().unwrap() - 2.176).abs() < 1e-3);
}
