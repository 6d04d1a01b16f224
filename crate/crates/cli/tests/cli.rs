use serde_json::Value;
use std::process::{Command, Output};

fn hbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbm")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = hbm(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn disk_even_spectrum() {
    let v = json(&["spectrum", "--body", "ball", "--dim", "2", "--grid", "s1:N=512", "--even", "--k", "3", "--json"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["config"]["grid"], "s1:N=512");
    let d = floats(&v["result"]["distinct_eigenvalues"]);
    for (got, want) in d.iter().zip([0.0, 4.0, 16.0]) {
        assert!((got - want).abs() < 1e-5, "{d:?}");
    }
    assert_eq!(v["result"]["multiplicities"], serde_json::json!([1, 2, 2]));
    assert_eq!(v["result"]["discretization"]["nodes"], 512);
    assert!(v["meta"]["version"].is_string());
}

#[test]
fn steklov_prints_the_value() {
    let out = hbm(&["steklov", "--n", "3", "--k", "2"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2.5\n");
}

#[test]
fn mixed_table_diagonal() {
    let v = json(&["mixed", "--bodies", "ball;ellipsoid:a=2,b=1", "--grid", "s1:N=512", "--json"]);
    let t = v["result"]["table"].as_array().unwrap();
    assert_eq!(t.len(), 2);
    let d = [t[0][0].as_f64().unwrap(), t[1][1].as_f64().unwrap()];
    assert!((d[0] - std::f64::consts::PI).abs() < 1e-10 && (d[1] - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    assert!((t[0][1].as_f64().unwrap() - t[1][0].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn default_grid_is_echoed() {
    let v = json(&["pbm-check", "--body0", "ball", "--json", "--no-meta"]);
    assert_eq!(v["config"]["grid"], "s1:N=512");
    assert_eq!(v["result"]["holds"], true);
    assert!((v["result"]["p_star"].as_f64().unwrap() + 2.0).abs() < 3e-6);
    assert!(v.get("meta").is_none());
}

#[test]
fn csv_round_trips_floats() {
    let out = hbm(&["mixed", "--bodies", "ball;ellipsoid:a=2,b=1", "--csv", "--no-meta"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# hbm schema=1 command=mixed"));
    assert_eq!(lines.next().unwrap(), "body,v0,v1");
    let j = json(&["mixed", "--bodies", "ball;ellipsoid:a=2,b=1", "--json", "--no-meta"]);
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let v0: f64 = row[1].parse().unwrap();
    assert_eq!(v0, j["result"]["table"][0][0].as_f64().unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(hbm(&["spectrum", "--body", "blob"]).status.code(), Some(2));
    assert_eq!(hbm(&["spectrum", "--body", "ball", "--grid", "s3:N=2"]).status.code(), Some(2));
    assert_eq!(hbm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hbm(&["boundary", "--quantity", "dk-upper"]).status.code(), Some(2));
    // h'' + h < 0 somewhere: a numerical guard, reported by name
    let out = hbm(&["spectrum", "--body", "trig:a=1,b=1,c2=0.34"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[field_invariant]"));
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_hbm"))
        .args(["steklov", "--n", "2", "--k", "2"])
        .env("HBM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_hbm"))
        .args(["steklov", "--n", "2", "--k", "2", "--json"])
        .env("HBM_THREADS", "2")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["threads"], 2);
}

#[test]
fn output_file_is_written() {
    let dir = std::env::temp_dir().join(format!("hbm-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let p = path.to_str().unwrap();
    assert!(hbm(&["reilly", "--domain", "square", "--poly", "x*y", "--json", "--output", p]).status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["result"]["residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn corpus_takes_the_global_seed() {
    let a = hbm(&["stability", "--corpus", "random:count=3", "--seed", "11", "--json", "--no-meta"]);
    let b = hbm(&["stability", "--corpus", "random:seed=11,count=3", "--json", "--no-meta"]);
    let (a, b): (Value, Value) =
        (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["config"]["corpus"], "random:seed=11,count=3");
    assert_eq!(a["result"]["count"], 3);
}

#[test]
fn boundary_reports_carry_direction() {
    let v = json(&["boundary", "--quantity", "bh-est", "--body", "lq:q=inf", "--degree", "2", "--json"]);
    assert_eq!(v["result"]["quantity"], "bh_lower");
    assert_eq!(v["result"]["direction"], "lower");
    assert!((v["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let v =
        json(&["boundary", "--quantity", "qkw", "--c-poin", "0.5", "--max-hess", "3", "--w-range", "0.25", "--json"]);
    assert_eq!(v["result"]["below_one"], true);
}
