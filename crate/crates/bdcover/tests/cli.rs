use serde_json::{json, Value};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdcover"))
        .args(args)
        .env_remove("BDCOVER_PRECISION")
        .output()
        .unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn symbol_example() {
    assert_eq!(
        ok_json(&["symbol", "--p", "5", "--m", "4", "--a", "5", "--b", "5"]),
        json!({"mu_m": {"m": 4, "exp": 2}})
    );
    assert_eq!(
        ok_json(&["symbol", "--p", "5", "--a", "2", "--b", "5"]),
        json!({"mu_m": {"m": 2, "exp": 1}})
    );
    assert_eq!(
        ok_json(&["symbol", "--p", "3", "--a", "3", "--b", "3"]),
        json!({"mu_m": {"m": 2, "exp": 1}})
    );
}

#[test]
fn good_examples() {
    assert_eq!(
        ok_json(&["good", "--p", "7", "--m", "3", "--torus", "split", "--x", "7,1/7"]),
        json!({"good": false})
    );
    assert_eq!(
        ok_json(&["good", "--p", "7", "--m", "3", "--torus", "split", "--x", "343,1/343"]),
        json!({"good": true})
    );
    assert_eq!(
        ok_json(&["good", "--p", "7", "--m", "2", "--torus", "split", "--x", "7,1/7"]),
        json!({"good": true})
    );
}

#[test]
fn gamma_and_nabla() {
    // γ(1) over Q₃ is i, γ(2) is −i: the Gauss sums 1 + 2e(±1/3) divided by √3.
    assert_eq!(
        ok_json(&["gamma", "--p", "3", "--t", "1"]),
        json!({"gamma": {"num": 1, "den": 4}})
    );
    assert_eq!(
        ok_json(&["gamma", "--p", "3", "--t", "2"]),
        json!({"gamma": {"num": 3, "den": 4}})
    );
    assert_eq!(
        ok_json(&["gamma", "--p", "5", "--t", "1"]),
        json!({"gamma": {"num": 0, "den": 1}})
    );
    // ⟨−1, 2⟩ over Q₅: γ(−1)γ(2) = 1·(−1).
    assert_eq!(
        ok_json(&["nabla", "--p", "5", "--g", "0,-1,1,0"]),
        json!({"nabla": {"num": 1, "den": 2}})
    );
}

#[test]
fn packet_examples() {
    for method in ["hasse", "weil"] {
        let v = ok_json(&[
            "dagger", "--p", "3", "--torus", "p", "--c", "1", "--y", "1", "--g0", "-1", "--method", method,
        ]);
        assert_eq!(v, json!({"dagger": -1}));
    }
    let v = ok_json(&["interplay", "--p", "3", "--torus", "p", "--c", "1", "--y", "1"]);
    assert_eq!(v["holds"], json!(true));
    let v = ok_json(&["mm", "--p", "3", "--torus", "p", "--c", "1", "--y", "1"]);
    assert_eq!(v["disc_pm"], json!("1"));
    assert_eq!(v["pass"], json!(true));
}

#[test]
fn stable_conjugation_examples() {
    let v = ok_json(&["cali", "--p", "3", "--torus", "p", "--nu", "3", "--x0", "-1"]);
    assert_eq!(v, json!({"cali": 1}));
    let v = ok_json(&["inv", "--p", "3", "--torus", "p", "--g", "1,0,0,2"]);
    assert_eq!(v["kappa_minus"], json!(-1));
    assert_eq!(v["kappa_plus"], json!(1));
    let v = ok_json(&["delta", "--p", "5", "--torus", "split", "--x0", "25,1/25"]);
    assert_eq!(v, json!({"delta_plus": {"num": 0, "den": 1}}));
    let v = ok_json(&["product-formula", "--a", "-1", "--b", "-1"]);
    assert_eq!(v["product"], json!(1));
}

#[test]
fn schema_of_roots_and_classes() {
    let v = ok_json(&[
        "delta", "--p", "5", "--torus", "u", "--x0", "3+2sqrtD", "--sign", "plus",
    ]);
    let r = &v["delta_plus"];
    assert!(r["num"].is_u64() && r["den"].is_u64());
}

#[test]
fn exit_codes() {
    let usage = [
        vec!["selftest", "--iters", "0"],
        vec!["symbol", "--p", "4", "--a", "1", "--b", "1"],
        vec!["symbol", "--p", "5", "--m", "3", "--a", "1", "--b", "1"],
        vec!["symbol", "--p", "5", "--a", "x", "--b", "1"],
        vec!["symbol", "--p", "5", "--a", "1/0", "--b", "1"],
        vec!["good", "--p", "7", "--torus", "split", "--x", "7"],
        vec!["no-such-command"],
    ];
    for args in &usage {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["good", "--p", "7", "--m", "3", "--torus", "split", "--x", "-1,-1"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"].is_string());
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_bdcover"))
        .args(["symbol", "--p", "5", "--a", "2", "--b", "5"])
        .env("BDCOVER_PRECISION", "nope")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_bdcover"))
        .args(["symbol", "--p", "5", "--a", "2", "--b", "5"])
        .env("BDCOVER_PRECISION", "12")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn selftest_is_deterministic() {
    let a = run(&["selftest", "--seed", "42", "--iters", "3"]);
    let b = run(&["selftest", "--seed", "42", "--iters", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["failures"], json!(0));
    assert_eq!(v["suites"].as_array().unwrap().len(), bdcover::suites::SUITES.len());
    let one = ok_json(&["selftest", "--seed", "42", "--iters", "3", "--suite", "hilbert"]);
    assert_eq!(one["suites"].as_array().unwrap().len(), 1);
}
