use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dvest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dvest")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn estimate_happy_path() {
    let dir = tempfile::tempdir().unwrap();
    // Counts 8:4 at (0, 1) are Exponential(ln 2) ratios.
    let t = write(dir.path(), "t.csv", "y,count\n0,8\n1,4\n");
    let o = dvest(&["estimate", "--table", &t, "--family", "exponential", "--method", "dv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!((v["params"][0].as_f64().unwrap() - 2f64.ln()).abs() < 1e-10);
    assert!(v["dv_at_optimum"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["exact"], Value::Bool(true));
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "y,count\n0,8\n1,oops\n");
    let o = dvest(&["estimate", "--table", &bad, "--family", "exponential", "--method", "dv"]);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());

    let neg = write(dir.path(), "neg.csv", "y,count\n0,8\n1,-4\n");
    assert_eq!(code(&dvest(&["estimate", "--table", &neg, "--family", "exponential", "--method", "dv"])), 2);

    let missing = dir.path().join("missing.csv");
    let o = dvest(&["distance", "--table", missing.to_str().unwrap(), "--model", "poisson:1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn no_solution_reports_status_and_fallback() {
    let dir = tempfile::tempdir().unwrap();
    // Increasing counts need a negative rate.
    let t = write(dir.path(), "t.csv", "y,count\n0,3\n1,9\n");
    let o = dvest(&["estimate", "--table", &t, "--family", "exponential", "--method", "dv"]);
    assert_eq!(code(&o), 3);
    let v = json(&o);
    assert_eq!(v["status"], "no_solution");
    assert!(v["fallback"]["params"][0].is_number());
}

#[test]
fn help_version_and_bad_flags() {
    assert_eq!(code(&dvest(&["--help"])), 0);
    assert_eq!(code(&dvest(&["estimate", "--help"])), 0);
    let v = dvest(&["--version"]);
    assert_eq!(code(&v), 0);
    assert!(String::from_utf8_lossy(&v.stdout).contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(code(&dvest(&["estimate", "--frobnicate"])), 2);
    assert_eq!(code(&dvest(&["no-such-command"])), 2);
}

#[test]
fn emitted_tables_feed_the_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = dvest(&[
        "simulate", "--experiment", "binomial-id", "--replicates", "100", "--seed", "5",
        "--emit-csv", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o)["accuracy"].is_array());
    assert!(out.join("replicates.csv").is_file());

    let t0 = out.join("tables/g0_r0.csv");
    let t1 = out.join("tables/g1_r0.csv");
    let (t0, t1) = (t0.to_str().unwrap(), t1.to_str().unwrap());

    let o = dvest(&["estimate", "--table", t0, "--family", "binomial", "--known", "trials=8", "--method", "dv"]);
    assert!(matches!(code(&o), 0 | 3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o)["params"].is_array());

    let o = dvest(&["select", "--table", t0, "--candidate", "binomial:8,0.1", "--candidate", "binomial:15,0.15"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o)["winner_index"].is_u64());

    let o = dvest(&["distance", "--table", t0, "--other", t1]);
    assert!(matches!(code(&o), 0 | 2), "{}", String::from_utf8_lossy(&o.stderr));
    let o = dvest(&["distance", "--table", t0, "--model", "binomial:8,0.1", "--top", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o)["dv"].as_f64().unwrap() >= 0.0);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["simulate", "--experiment", "weibull-gamma", "--replicates", "100", "--seed", "9"];
    let (a, b) = (dvest(&args), dvest(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.csv", "y,count\n0,10\n1,6\n2,3\n");
    let args = ["estimate", "--table", &t, "--family", "poisson", "--method", "new-mle"];
    assert_eq!(dvest(&args).stdout, dvest(&args).stdout);
}

#[test]
fn normal_table_and_truncated_classical() {
    let o = dvest(&["simulate", "--experiment", "normal-table"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["comparisons"].as_array().unwrap().len(), 50);

    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.csv", "y,count\n-1.5331,23000\n0.038690,89000\n");
    let o = dvest(&[
        "estimate", "--table", &t, "--family", "normal", "--known", "sigma=1",
        "--method", "classical-truncated", "--region", "[-1.7951,-1.2712),[-0.22335,0.30055)",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = json(&o)["params"][0].as_f64().unwrap();
    assert!((m - 0.110917).abs() < 1e-5, "{m}");

    // A support point outside the region is a precondition failure.
    let o = dvest(&[
        "estimate", "--table", &t, "--family", "normal", "--known", "sigma=1",
        "--method", "classical-truncated", "--region", "[0,1)",
    ]);
    assert_eq!(code(&o), 2);
}
