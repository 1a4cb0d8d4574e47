use g2_demo::{eh_curves, positivity_scan, solver_trace};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn eh_curves_decay() {
    let v = parse(eh_curves(1.0, 12));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    let dev: Vec<f64> = rows.iter().map(|r| r["deviation"].as_f64().unwrap()).collect();
    assert!(dev.windows(2).all(|w| w[1] < w[0]));
    assert!(dev[11] < 1e-7);
}

#[test]
fn eh_curves_rejects_bad_input() {
    assert!(parse(eh_curves(0.0, 10)).get("error").is_some());
}

#[test]
fn positivity_scan_crosses_threshold() {
    let v = parse(positivity_scan("1,2,3", 0.0, -3.0, 31));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["positive"], true);
    assert!((rows[0]["volume"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(rows.iter().any(|r| r["positive"] == false));
    assert!(rows.iter().filter(|r| r["positive"] == false).all(|r| r["metric_det"].is_null()));
    assert!(parse(positivity_scan("1,2", 0.0, 1.0, 3)).get("error").is_some());
}

#[test]
fn solver_trace_converges() {
    let v = parse(solver_trace(0.01, "2,1,1:45", 8));
    assert_eq!(v["converged"], true);
    assert!(v["trace"].as_array().unwrap().len() > 2);
    assert!(parse(solver_trace(0.01, "garbage", 8)).get("error").is_some());
}
