use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tempfile::TempDir;
use tlseq_cli::{run, EXIT_INVALID, EXIT_OK};

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, v.to_string()).unwrap();
    p
}

fn space(entries: Value, alpha: f64, p: &str, q: &str) -> Value {
    json!({
        "matrix": { "dim": 2, "mode": "rational", "entries": entries },
        "alpha": alpha, "p": p, "q": q,
    })
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["tlseq"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_reflection_pair() {
    let dir = TempDir::new().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        &space(json!([["2", "0"], ["0", "2"]]), 0.0, "1", "2"),
    );
    let b = write(
        dir.path(),
        "b.json",
        &space(json!([["2", "0"], ["0", "-2"]]), 0.0, "1", "2"),
    );
    let r = report(&["classify", "--space-a", path(&a), "--space-b", path(&b), "--mmax", "64"]);
    assert_eq!(r["command"], "classify");
    let c = &r["result"]["classification"];
    assert_eq!(c["verdict"], "equal");
    assert_eq!(c["reason"], "orbit_finite");
    assert_eq!(c["period"], 2);
}

#[test]
fn norm_of_a_delta() {
    let dir = TempDir::new().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        &space(json!([["2", "0"], ["0", "2"]]), 0.0, "1", "2"),
    );
    let c = write(
        dir.path(),
        "delta_j2.json",
        &json!({ "entries": [{ "j": 2, "k": [0, 0], "re": 1.0 }] }),
    );
    let r = report(&["norm", "--space", path(&s), "--seq", path(&c), "--method", "exact"]);
    assert!((r["result"]["value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(r["result"]["method"], "exact2d-overlay");
    assert_eq!(r["result"]["error_bound"], 0.0);
    assert!(r.get("seed").is_none());
    let m = report(&[
        "norm",
        "--space",
        path(&s),
        "--seq",
        path(&c),
        "--method",
        "mc",
        "--samples",
        "10000",
    ]);
    assert_eq!(m["result"]["method"], "monte-carlo");
    assert_eq!(m["seed"], 0);
}

#[test]
fn verify_case1_slope_and_csv() {
    let dir = TempDir::new().unwrap();
    let rot = json!({
        "a": { "dim": 2, "mode": "rational", "entries": [["2", "0"], ["0", "2"]] },
        "b": { "dim": 2, "mode": "float", "entries": [
            [2.0 * 1f64.cos(), -2.0 * 1f64.sin()],
            [2.0 * 1f64.sin(), 2.0 * 1f64.cos()]
        ] },
    });
    let pair = write(dir.path(), "rot.json", &rot);
    let csv = dir.path().join("law.csv");
    let args = [
        "verify",
        "--family",
        "case1",
        "--pair",
        path(&pair),
        "--p",
        "1",
        "--q1",
        "2",
        "--sizes",
        "2,3,4,5",
        "--samples",
        "1000000",
        "--seed",
        "0",
        "--out",
        path(&csv),
    ];
    let r = report(&args);
    let slope = r["result"]["slope"].as_f64().unwrap();
    assert!((0.35..=0.65).contains(&slope), "slope {slope}");
    assert_eq!(r["result"]["target"], "ratio");
    let table = fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 5);
    assert!(table.starts_with("size,x,measured,error_bound,predicted,ratio,methods"));
    // same manifest, same numbers
    let again = report(&args);
    assert_eq!(r["result"], again["result"]);
    assert_eq!(fs::read_to_string(&csv).unwrap(), table);
}

#[test]
fn verify_prints_csv_on_request() {
    let dir = TempDir::new().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        &space(json!([["2", "0"], ["0", "2"]]), 0.0, "inf", "2"),
    );
    let (code, out, _) = call(&[
        "verify",
        "--family",
        "multiscale",
        "--space",
        path(&s),
        "--sizes",
        "1,2,4",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[3].starts_with("4,"));
}

#[test]
fn witness_manifest_round_trip() {
    let dir = TempDir::new().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        &space(json!([["2", "0"], ["0", "2"]]), 0.0, "inf", "1"),
    );
    let b = write(
        dir.path(),
        "b.json",
        &json!({ "dim": 2, "mode": "rational", "entries": [["0", "-2"], ["2", "0"]] }),
    );
    let out = dir.path().join("manifest.json");
    let r = report(&[
        "witness",
        "--family",
        "case2",
        "--space",
        path(&s),
        "--b",
        path(&b),
        "--size",
        "2",
        "--out",
        path(&out),
    ]);
    assert_eq!(r["result"]["a"]["law"]["kind"], "at-least");
    assert_eq!(r["result"]["b"]["law"]["kind"], "at-most");
    assert_eq!(r["result"]["a"]["support"]["kind"], "explicit");
    let again = report(&["witness", "--family", "case2", "--manifest", path(&out), "--size", "2"]);
    assert_eq!(r["result"], again["result"]);
}

#[test]
fn orbit_and_expansive_reports() {
    let dir = TempDir::new().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        &json!({ "dim": 2, "mode": "rational", "entries": [["2", "0"], ["0", "2"]] }),
    );
    let b = write(
        dir.path(),
        "b.json",
        &json!({ "dim": 2, "mode": "rational", "entries": [["0", "-2"], ["2", "0"]] }),
    );
    let r = report(&["orbit", "--a", path(&a), "--b", path(&b), "--jrange", "16"]);
    assert_eq!(r["result"]["verdict"]["period"], 4);
    assert_eq!(r["result"]["decomposition"]["count"], 4);
    assert_eq!(r["result"]["brute_force_count"], 4);

    let h = write(
        dir.path(),
        "h.json",
        &json!({ "dim": 2, "mode": "rational", "entries": [["1/2", "0"], ["0", "3"]] }),
    );
    let e = report(&["expansive", "--matrix", path(&h)]);
    assert_eq!(e["result"]["verdict"], "not-expansive");
}

#[test]
fn invalid_input_exits_with_one() {
    let (code, _, err) = call(&["frobnicate"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("Usage"));
    let (code, _, _) = call(&["norm", "--space", "/nonexistent.json", "--seq", "/nonexistent.json"]);
    assert_eq!(code, EXIT_INVALID);
    let (code, _, _) = call(&["classify", "--space-a", "x", "--bogus"]);
    assert_eq!(code, EXIT_INVALID);
    let dir = TempDir::new().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        &space(json!([["1", "0"], ["0", "2"]]), 0.0, "1", "1"),
    );
    let c = write(dir.path(), "c.json", &json!({ "entries": [] , "dim": 2 }));
    let (code, _, err) = call(&["norm", "--space", path(&s), "--seq", path(&c)]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("not expansive"), "{err}");
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify"));
}
