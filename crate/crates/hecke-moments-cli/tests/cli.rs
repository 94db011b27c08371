use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke-moments"))
        .args(args)
        .env_remove("HECKE_MOMENTS_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn sample() -> String {
    format!("{}/../hecke-moments/data/sample_synthetic.csv", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn rmt_coeffs_k3() {
    let out = run(&["rmt-coeffs", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["command", "params", "values", "error_bounds", "provenance", "wall_time", "precision"] {
        assert!(v.get(key).is_some(), "missing {}", key);
    }
    let d3: f64 = v["values"]["d_k"].as_str().unwrap().parse().unwrap();
    assert!((d3 - 4.0 / (3.0 * std::f64::consts::PI.powi(2))).abs() < 1e-12);
    assert_eq!(v["precision"]["digits"], 50);
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["transform-eval", "--which", "hstar", "--center", "30", "--width", "3", "--point", "0.2,1.5", "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["wall_time"].is_null());
}

#[test]
fn exit_codes_by_failure_kind() {
    assert_eq!(run(&["rmt-coeffs", "--k", "three"]).status.code(), Some(2));
    assert_eq!(run(&["zeta-moment", "--T", "30", "--k", "1", "--digits", "10"]).status.code(), Some(2));
    assert_eq!(run(&["transform-eval", "--which", "hstar", "--center", "30", "--point", "1"]).status.code(), Some(2));
    // the height is beyond what 30 digits can certify
    assert_eq!(run(&["zeta-moment", "--T", "2000", "--k", "1", "--digits", "30"]).status.code(), Some(3));
    assert_eq!(run(&["spectral-sum", "--file", "/nonexistent.csv", "--k", "2", "--K", "20"]).status.code(), Some(4));
    assert_eq!(run(&["spectral-sum", "--file", &sample(), "--k", "2", "--K", "45"]).status.code(), Some(4));
}

#[test]
fn spectral_sum_on_sample() {
    let out = run(&["spectral-sum", "--file", &sample(), "--k", "1", "--K", "20", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["values"]["value"].as_str().unwrap().parse::<f64>().unwrap() > 0.0);
    assert_eq!(v["params"]["complete_to"], 30.0);
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join(format!("hm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "digits = 40\nwidth = 3\ntiming = false\n").unwrap();
    let cmd = |extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_hecke-moments"));
        c.args(["transform-eval", "--which", "hstar", "--center", "30", "--point", "0.2"]).args(extra).env("HECKE_MOMENTS_CONFIG", &path);
        c.output().unwrap()
    };
    let v = json(&cmd(&[]));
    assert_eq!(v["precision"]["digits"], 40);
    assert_eq!(v["params"]["weight"]["width"], 3.0);
    assert!(v["wall_time"].is_null());
    let v = json(&cmd(&["--digits", "45", "--width", "4"]));
    assert_eq!(v["precision"]["digits"], 45);
    assert_eq!(v["params"]["weight"]["width"], 4.0);
    std::fs::write(&path, "colour = blue\n").unwrap();
    assert_eq!(cmd(&[]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_all_subset_passes() {
    let out = run(&["verify-all", "--quick", "--only", "1,2,11,13", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["values"]["15"]["passed"], true);
    assert_eq!(v["values"]["11"]["passed"], true);
    assert!(run(&["verify-all", "--only", "16"]).status.code() == Some(2));
}
