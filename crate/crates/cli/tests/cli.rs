use std::process::{Command, Output};

use serde_json::Value;

fn sieve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sieve"))
        .args(args)
        .env_remove("SIEVE_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn constants_for_uniform_law() {
    let out = sieve(&["constants", "--law", "beta:1", "--n", "1000"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["regime"], "A");
    assert!((v["a"].as_f64().unwrap() - 2.62826).abs() < 1e-5);
    assert!((v["b"].as_f64().unwrap() - 5.908755).abs() < 1e-6);
}

#[test]
fn constants_report_auxiliary_values() {
    let c = json(&sieve(&["constants", "--law", "paretolog:1.5", "--n", "3000"]));
    assert_eq!(c["regime"], "C");
    assert!((c["c_n"].as_f64().unwrap() - 4.0).abs() < 1e-8);
    let d = json(&sieve(&["constants", "--law", "paretolog:1", "--n", "1e6"]));
    assert_eq!(d["regime"], "D");
    assert!(d["m"].is_number() && d["r"].is_number());
    let e = json(&sieve(&["constants", "--law", "paretolog:0.5", "--n", "1e9"]));
    assert_eq!(e["b"].as_f64().unwrap(), 0.0);
}

#[test]
fn single_ball_rows() {
    let out = sieve(&["simulate", "--law", "beta:1", "--n", "1", "--replicates", "5", "--seed", "7"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "replicate,raw,normalized");
    assert_eq!(lines.len(), 6);
    for (i, line) in lines[1..].iter().enumerate() {
        assert_eq!(*line, format!("{i},1,1"));
    }
}

#[test]
fn variance_suite_passes() {
    let out = sieve(&["verify", "--suite", "variance-log2", "--law", "beta:1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let est = v["checks"][0]["estimate"].as_f64().unwrap();
    assert!((est / std::f64::consts::LN_2 - 1.0).abs() <= 0.05);
}

#[test]
fn other_suites_pass() {
    for (suite, reps) in [("ewens-mean", "20000"), ("shot-noise", "20000"), ("invariants", "5000"), ("determinism", "2000")] {
        let out = sieve(&["verify", "--suite", suite, "--law", "beta:1", "--replicates", reps, "--seed", "3"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn failed_suite_exits_one() {
    // One replicate of K_2 is 1 or 2 with zero spread, never the mean 1.5.
    let out = sieve(&["verify", "--suite", "ewens-mean", "--law", "beta:1", "--n", "2", "--replicates", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 9] = [
        &["constants", "--law", "bogus:1", "--n", "10"],
        &["constants", "--law", "beta:1", "--n", "1.5"],
        &["constants", "--law", "beta:1"],
        &["verify", "--suite", "nope"],
        &["simulate", "--law", "beta:1", "--n", "1e16", "--replicates", "1"],
        &["simulate", "--law", "beta:1", "--t", "5", "--target", "k_n"],
        &["verify", "--suite", "ewens-mean", "--law", "paretolog:1.5"],
        &["limit-cdf", "--kind", "stable-c", "--alpha", "2.5"],
        &["simulate", "--law", "beta:1", "--n", "10", "--threads", "0"],
    ];
    for args in cases {
        assert_eq!(sieve(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_three() {
    let out = sieve(&["simulate", "--law", "beta:1", "--n", "10", "--replicates", "2", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn summary_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.json");
    let out = sieve(&[
        "simulate", "--law", "example:0.3", "--n", "1e6", "--replicates", "50", "--normalize",
        "--summary", summary.to_str().unwrap(), "--output", dir.path().join("s.csv").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let back = sieve::mc::read_summary(std::fs::File::open(&summary).unwrap()).unwrap();
    assert_eq!(back.plan_hash, back.plan.hash());
    assert_eq!(back.count, 50);
    assert!(back.plan.normalization.is_some());
    let raw: Value = serde_json::from_slice(&std::fs::read(&summary).unwrap()).unwrap();
    assert_eq!(raw["plan"]["eps"].as_f64().unwrap(), 1e-9);
    assert!(raw["config"]["version"].is_string());
}

#[test]
fn thread_env_and_flag_agree() {
    let args = ["simulate", "--law", "paretolog:1.5", "--n", "1e9", "--replicates", "300", "--seed", "11"];
    let one = sieve(&[&args[..], &["--threads", "1"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_sieve")).args(args).env("SIEVE_THREADS", "3").output().unwrap();
    assert!(one.status.success() && env.status.success());
    assert_eq!(one.stdout, env.stdout);
    let json_out = Command::new(env!("CARGO_BIN_EXE_sieve"))
        .args(args)
        .args(["--format", "json"])
        .env("SIEVE_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(json(&json_out)["config"]["threads"], 3);
}

#[test]
fn limit_cdf_table() {
    let out = sieve(&["limit-cdf", "--kind", "normal", "--from", "-1", "--to", "1", "--points", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "x,cdf");
    assert_eq!(rows[2], "0,0.5");
    let stable = sieve(&["limit-cdf", "--kind", "stable-d", "--points", "5"]);
    assert!(stable.status.success());
    let values: Vec<f64> = String::from_utf8(stable.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
}
