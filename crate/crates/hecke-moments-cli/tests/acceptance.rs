//! Full acceptance run through the `verify-all` subcommand, one line per criterion.
//! Takes several minutes; the tolerances live in the library's verify module.

use std::io::Write;
use std::process::Command;

use serde_json::Value;

#[test]
fn acceptance_criteria_1_to_15() {
    let out = Command::new(env!("CARGO_BIN_EXE_hecke-moments"))
        .args(["verify-all", "--digits", "50", "--rel-tol", "1e-12"])
        .env_remove("HECKE_MOMENTS_CONFIG")
        .output()
        .expect("binary runs");
    let doc: Value = serde_json::from_slice(&out.stdout).expect("verify-all prints JSON");
    let values = doc["values"].as_object().expect("per-criterion values");
    // written straight to stderr so the lines show up without --nocapture
    let mut err = std::io::stderr().lock();
    let mut failed = Vec::new();
    for id in 1..=15u32 {
        let c = &values[&id.to_string()];
        let ok = c["passed"].as_bool() == Some(true);
        let name = c["name"].as_str().unwrap_or("?");
        writeln!(err, "criterion {:>2} {:<40} {}", id, name, if ok { "PASS" } else { "FAIL" }).unwrap();
        if !ok {
            writeln!(err, "    {}", c).unwrap();
            failed.push(id);
        }
    }
    writeln!(err, "wall time {:.1} s", doc["wall_time"].as_f64().unwrap_or(f64::NAN)).unwrap();
    assert!(failed.is_empty(), "failed criteria {:?}", failed);
    assert_eq!(out.status.code(), Some(0));
}
