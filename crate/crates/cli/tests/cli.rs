use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::tempdir;

fn g2(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_g2")).args(args).output().expect("spawn g2");
    let code = out.status.code().expect("exit code");
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, report, String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_phi0_reports_seven_monomials() {
    let (code, r, _) = g2(&["verify-phi0"]);
    assert_eq!(code, 0);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["payload"]["monomial_count"], 7);
    assert_eq!(r["payload"]["volume"], "1");
    assert_eq!(r["payload"]["hodge_dual"]["coeffs"]["4,5,6,7"], "1");
    assert_eq!(r["payload"]["hodge_dual"]["coeffs"]["1,3,4,6"], "-1");
}

#[test]
fn joyce_orbifold() {
    let (code, r, _) = g2(&["orbifold", "--group", "builtin:joyce"]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["group_order"], 8);
    assert_eq!(r["payload"]["singular_component_count"], 12);
    assert_eq!(r["payload"]["resolution_betti"]["b2"], 12);
    assert_eq!(r["payload"]["resolution_betti"]["b3"], 43);
}

#[test]
fn orbifold_group_file() {
    let dir = tempdir().unwrap();
    let path = write(
        dir.path(),
        "group.json",
        r#"{"generators": [{"diag": [1,1,1,-1,-1,-1,-1], "t": ["0","0","0","0","0","0","0"]}]}"#,
    );
    let (code, r, _) = g2(&["orbifold", "--group", &path]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["payload"]["group_order"], 2);
    assert_eq!(r["payload"]["singular_component_count"], 16);
}

#[test]
fn malformed_group_file_names_location() {
    let dir = tempdir().unwrap();
    let path = write(dir.path(), "bad.json", "{\"generators\": [\n  {\"diag\": [1,1,}\n]}");
    let (code, r, err) = g2(&["orbifold", "--group", &path]);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "error");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn tcs_betti_x8_pair() {
    let (code, r, _) = g2(&["tcs", "betti", "--block1", "x8-blowup", "--block2", "x8-blowup", "--b2", "0"]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["b3_if_b2_known"], 99);
}

#[test]
fn unknown_block_is_a_data_error() {
    let (code, r, _) = g2(&["tcs", "betti", "--block1", "nope", "--block2", "x8-blowup"]);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "error");
}

#[test]
fn neck_check_exit_codes() {
    let (ok, r, _) = g2(&["tcs", "neck-check"]);
    assert_eq!(ok, 0);
    assert_eq!(r["payload"]["preserved"], true);
    let (bad, r, _) = g2(&["tcs", "neck-check", "--violate"]);
    assert_eq!(bad, 2);
    assert_eq!(r["status"], "infeasible");
}

#[test]
fn catalog_ingestion() {
    let dir = tempdir().unwrap();
    let empty = write(dir.path(), "empty.json", "");
    let (code, r, _) = g2(&["tcs", "catalog", "--catalog", &empty]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["count"], 0);

    let (_, builtin, _) = g2(&["tcs", "catalog"]);
    let entries = builtin["payload"]["entries"].as_array().unwrap().clone();
    assert!(entries.iter().any(|e| e["name"] == "x8-blowup"));

    let mut bad = entries[0].clone();
    bad["d"] = Value::from(bad["b2_bar"].as_u64().unwrap() + 1);
    let path = write(dir.path(), "bad.json", &serde_json::to_string(&vec![bad]).unwrap());
    let (code, _, err) = g2(&["tcs", "catalog", "--catalog", &path]);
    assert_eq!(code, 1);
    assert!(err.contains("x8-blowup"), "{err}");

    let dup = write(dir.path(), "dup.json", &serde_json::to_string(&vec![entries[0].clone(), entries[0].clone()]).unwrap());
    let (code, _, err) = g2(&["tcs", "catalog", "--catalog", &dup]);
    assert_eq!(code, 1);
    assert!(err.contains("duplicate"), "{err}");
}

#[test]
fn k3_commands() {
    let (code, r, _) = g2(&["k3", "lattice-invariants"]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["signature"], serde_json::json!([3, 19]));
    let (code, r, _) = g2(&["k3", "find-isometry", "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["verified"], true);
    let (code, r, _) = g2(&["k3", "match"]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["verified"], true);
}

#[test]
fn k3_negatives_exit_two() {
    let dir = tempdir().unwrap();
    let mut v = vec!["0"; 22];
    v[0] = "1";
    v[1] = "1";
    let mut w = vec!["0"; 22];
    w[0] = "1";
    w[1] = "2";
    let body = serde_json::json!({ "vectors": { "v": v, "w": w } }).to_string();
    let path = write(dir.path(), "pair.json", &body);
    let (code, r, _) = g2(&["k3", "find-isometry", "--input", &path]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "infeasible");

    let (_, a, _) = g2(&["k3", "match", "--square-half", "3"]);
    let (_, b, _) = g2(&["k3", "match", "--square-half", "4"]);
    let body = serde_json::json!({ "source": a["payload"]["source"], "target": b["payload"]["target"] }).to_string();
    let path = write(dir.path(), "classes.json", &body);
    let (code, r, _) = g2(&["k3", "match", "--input", &path]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "infeasible");
}

#[test]
fn solve_torsion_and_negatives() {
    let (code, r, _) = g2(&["solve-torsion", "--epsilon", "0.01", "--resolution", "16"]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["converged"], true);
    assert_eq!(r["payload"]["closed"], true);
    assert_eq!(r["payload"]["class_preserved"], true);
    assert!(r["payload"]["final_residual"].as_f64().unwrap() <= 1e-8);
    let (code, r, _) = g2(&["solve-torsion", "--epsilon", "0.5"]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "infeasible");
    let (code, r, _) = g2(&["solve-torsion", "--max-iter", "1"]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "diverged");
    let (code, _, _) = g2(&["solve-torsion", "--resolution", "12"]);
    assert_eq!(code, 1);
}

#[test]
fn eh_check_report_fields() {
    let (code, r, _) = g2(&["eh-check", "--s", "1", "--samples", "100"]);
    assert_eq!(code, 0);
    let p = &r["payload"];
    for key in ["s", "det_h_max_dev", "ricci_max", "ale_exponent_k0", "ale_exponent_k1", "scaling_winner"] {
        assert!(p.get(key).is_some(), "missing {key}");
    }
    assert_eq!(p["scaling_winner"], "s/lambda");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(g2(&["no-such-command"]).0, 1);
    assert_eq!(g2(&["verify-phi0", "--bogus"]).0, 1);
    assert_eq!(g2(&["--help"]).0, 0);
}

#[test]
fn out_path_and_determinism() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for args in [
        vec!["k3", "find-isometry", "--seed", "9"],
        vec!["solve-torsion", "--seed", "9"],
        vec!["eh-check", "--samples", "50", "--seed", "9"],
    ] {
        let run = |p: &Path| {
            let mut full = args.clone();
            full.extend(["--out", p.to_str().unwrap()]);
            let (code, stdout, _) = g2(&full);
            assert_eq!(code, 0);
            assert_eq!(stdout, Value::Null);
            std::fs::read(p).unwrap()
        };
        assert_eq!(run(&a), run(&b), "{args:?}");
    }
}
