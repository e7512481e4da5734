use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspec")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = qspec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn qdim_examples() {
    let v = json(&["qdim", "--ell", "2", "--weight", "1,1"]);
    // [2][4] = q^-4 + 2q^-2 + 2 + 2q^2 + q^4
    assert_eq!(v["exact"]["terms"], serde_json::json!([[-4, "1"], [-2, "2"], [0, "2"], [2, "2"], [4, "1"]]));
    assert_eq!(v["classical_value"], "8");
    let out = qspec(&["qdim", "--ell", "2", "--weight", "1,1", "--classical"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "8\n");
    let v = json(&["qdim", "--ell", "1", "--weight", "0", "--q", "0.3"]);
    assert_eq!(v["classical_value"], "1");
    assert_eq!(v["numeric"], 1.0);
}

#[test]
fn weights_examples() {
    let v = json(&["weights", "--ell", "2", "--weight", "1,1"]);
    assert_eq!(v["distinct_weights"], 7);
    let zero = v["entries"].as_array().unwrap().iter().find(|e| e[0] == serde_json::json!([0, 0])).unwrap();
    assert_eq!(zero[1], 2);
    let v = json(&["weights", "--ell", "3", "--weight", "0,0,0", "--method", "freudenthal"]);
    assert_eq!(v["entries"], serde_json::json!([[[0, 0, 0], 1]]));
    let v = json(&["weights", "--ell", "3", "--weight", "2,1,0", "--method", "compare"]);
    assert_eq!(v["agree"], true);
}

#[test]
fn spectral_examples() {
    let a = json(&["specdim", "--ell", "2", "--q", "0.5", "--weight", "qdim"]);
    let e = a["estimate"].as_f64().unwrap();
    assert!((e - 4.0).abs() < 1e-3);
    let b = json(&["specdim", "--ell", "2", "--q", "0.5", "--weight", "qdim-inverse"]);
    assert!((b["estimate"].as_f64().unwrap() - e).abs() < 1e-10 * e);
    let c = json(&["specdim", "--ell", "2", "--q", "0.5", "--weight", "classical"]);
    assert!(c["estimate"].as_f64().unwrap().abs() < 0.05);
    let r = json(&["residue", "--ell", "2", "--toy", "--tol", "1e-14"]);
    let expected = 1.0 / 2f64.ln();
    assert!((r["value"].as_f64().unwrap() - expected).abs() < 1e-8 * expected);
}

#[test]
fn zeta_csv_columns() {
    let out = qspec(&["--format", "csv", "zeta", "--ell", "2", "--q", "0.5", "--s", "5,5.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,value,terms_used,tail_estimate"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn config_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    fs::write(&path, r#"{"ell": 3, "N": 2, "q": 0.3}"#).unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["--config", p, "zeta", "--s", "7"]);
    assert_eq!(v["model"]["ell"], 3);
    assert_eq!(v["model"]["N"], 2);
    assert_eq!(v["model"]["q"], 0.3);
    let v = json(&["--config", p, "zeta", "--s", "7", "--q", "0.5", "--N", "-1"]);
    assert_eq!(v["model"]["q"], 0.5);
    assert_eq!(v["model"]["N"], -1);
    fs::write(&path, r#"{"ell": 3, "q": 0.3, "extra": true}"#).unwrap();
    assert_eq!(code(&qspec(&["--config", p, "zeta", "--s", "7"])), 2);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = qspec(&["qdim", "--ell", "3", "--weight", "1,0,1", "--output", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["classical_value"], "15");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&qspec(&["qdim", "--ell", "2", "--weight", "1,-1"])), 2);
    assert_eq!(code(&qspec(&["qdim", "--ell", "2", "--weight", "1"])), 2);
    assert_eq!(code(&qspec(&["zeta", "--ell", "2", "--q", "1.5", "--s", "5"])), 2);
    assert_eq!(code(&qspec(&["--format", "csv", "qdim", "--ell", "1", "--weight", "1"])), 2);
    assert_eq!(code(&qspec(&["twisted", "--s", "3.5"])), 2);
    let capped = Command::new(env!("CARGO_BIN_EXE_qspec"))
        .args(["weights", "--ell", "2", "--weight", "2,2"])
        .env("QSPEC_MAX_PATTERNS", "5")
        .output()
        .unwrap();
    assert_eq!(code(&capped), 3);
    let bad_env = Command::new(env!("CARGO_BIN_EXE_qspec"))
        .args(["weights", "--ell", "2", "--weight", "1,0"])
        .env("QSPEC_MAX_PATTERNS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad_env), 2);
    assert_eq!(code(&qspec(&["specdim", "--ell", "2", "--probe", "-1"])), 2);
}

#[test]
fn twisted_trivial_operators() {
    for ops in ["identity", "diagonal"] {
        let v = json(&["twisted", "--operators", ops, "--size", "40"]);
        for row in v["scan"].as_array().unwrap() {
            assert_eq!(row["defect"], 0.0);
            assert_eq!(row["lhs"], row["rhs"]);
        }
    }
    let v = json(&["twisted"]);
    let d: Vec<f64> = v["scan"].as_array().unwrap().iter().map(|r| r["defect"].as_f64().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

#[test]
fn deterministic_output() {
    let args = ["zeta", "--ell", "3", "--q", "0.7", "--s", "6.5,7,9", "--weight", "qdim-inverse"];
    assert_eq!(qspec(&args).stdout, qspec(&args).stdout);
    let out = qspec(&["verify"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["profile"], "quick");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}
