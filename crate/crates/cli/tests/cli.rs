//! End-to-end checks of the command-line surface via the built binary.

use std::path::PathBuf;
use std::process::Command;

fn paroforge() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paroforge"))
}

fn tmp_path(name: &str) -> PathBuf {
    let mut dir = std::env::temp_dir();
    dir.push(format!("paroforge-cli-{}-{name}", std::process::id()));
    dir
}

fn write_toy_problem() -> PathBuf {
    let path = tmp_path("rt.json");
    let out = paroforge()
        .args(["rt", "--delta", "0.5", "--out"])
        .arg(&path)
        .output()
        .expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn rt_validate_and_solve_round_trip() {
    let path = write_toy_problem();

    let out = paroforge()
        .args(["validate", "--input"])
        .arg(&path)
        .output()
        .expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = paroforge()
        .args(["solve-aro", "--input"])
        .arg(&path)
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((parsed["opt"].as_f64().unwrap() - 30.0).abs() < 1e-6);
    assert_eq!(parsed["vertex_count"].as_u64().unwrap(), 4);
}

#[test]
fn refine_reaches_the_refined_band() {
    let path = write_toy_problem();
    let trace = tmp_path("trace.json");
    let out = paroforge()
        .args(["refine", "--method", "alg1", "--input"])
        .arg(&path)
        .arg("--trace")
        .arg(&trace)
        .output()
        .expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(parsed["x"][0].as_f64().unwrap() <= 30.0 + 1e-6);
    assert!((parsed["worst_case"].as_f64().unwrap() - 30.0).abs() < 1e-6);
    assert_eq!(parsed["certified"].as_bool().unwrap(), false);
    let trace_text = std::fs::read_to_string(&trace).unwrap();
    let entries: serde_json::Value = serde_json::from_str(&trace_text).unwrap();
    assert!(!entries.as_array().unwrap().is_empty());
}

#[test]
fn check_extension_flags_the_static_rule() {
    let path = write_toy_problem();
    let out = paroforge()
        .args(["check-extension", "--x", "25", "--static-y", "35", "--input"])
        .arg(&path)
        .output()
        .expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((parsed["bound"].as_f64().unwrap() - 5.0).abs() < 1e-6);
    assert_eq!(parsed["is_extension"].as_bool().unwrap(), false);
}

#[test]
fn fme_and_vertices_dump() {
    let path = write_toy_problem();
    let out = paroforge()
        .args(["vertices", "--input"])
        .arg(&path)
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["count"].as_u64().unwrap(), 4);

    let out = paroforge()
        .args(["fme", "--filter", "syntactic", "--input"])
        .arg(&path)
        .output()
        .expect("spawn");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(parsed["rows_after"].as_u64().unwrap() >= 1);
    assert!(!parsed["ledger"].as_array().unwrap().is_empty());
}

#[test]
fn invalid_document_fails_with_field_name() {
    let path = tmp_path("broken.json");
    let text = std::fs::read_to_string(write_toy_problem()).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc.as_object_mut().unwrap().remove("B");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = paroforge()
        .args(["validate", "--input"])
        .arg(&path)
        .output()
        .expect("spawn");
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains('B'), "{stderr}");
}

#[test]
fn deterministic_benchmark_is_reproducible() {
    let run = || {
        let out = paroforge()
            .args([
                "bench-fl",
                "--n",
                "3",
                "--m",
                "2",
                "--gamma",
                "22",
                "--instances",
                "2",
                "--seed",
                "9",
                "--samples",
                "3",
                "--deterministic",
            ])
            .output()
            .expect("spawn");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    assert!(a.starts_with("instance,seed,opt"));
    assert!(a.lines().any(|l| l.starts_with("diff_share,")));
}
