//! End-to-end tests of the binary: flags, exit codes, formats, cache
//! behavior, and report determinism.

use std::process::{Command, Output};

fn sqwhit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqwhit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn compute_reduced_family() {
    let out = sqwhit(&[
        "compute", "--family", "f", "--lambda", "[1]", "--n", "2", "--D", "4",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["family"], "f");
    let terms = v["poly"]["terms"].as_array().unwrap();
    // m_(), m_(1), m_(1,1)
    assert_eq!(terms.len(), 3);
}

#[test]
fn compute_grothendieck_row() {
    let out = sqwhit(&[
        "compute", "--family", "G", "--lambda", "[1]", "--n", "2", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"[1]\",\"1=1\""));
    assert!(text.contains("\"[1,1]\",\"b1=-1\""));
}

#[test]
fn malformed_partition_is_usage_error() {
    let out = sqwhit(&["compute", "--family", "f", "--lambda", "[1,2]", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_is_usage_error() {
    let out = sqwhit(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let args = [
        "verify", "--suite", "eigen", "--n", "2", "--box", "2,2", "--seed", "7",
    ];
    let first = sqwhit(&args);
    assert_eq!(first.status.code(), Some(0));
    let second = sqwhit(&args);
    let strip = |out: &Output| {
        let mut v = stdout_json(out);
        v.as_object_mut().unwrap().remove("wall_ms");
        v
    };
    assert_eq!(strip(&first), strip(&second));
}

#[test]
fn gram_identity_matrix() {
    let out = sqwhit(&[
        "gram",
        "--kind",
        "grothendieck",
        "--box",
        "1,2",
        "--n",
        "2",
        "--D",
        "4",
    ]);
    let v = stdout_json(&out);
    for entry in v["entries"].as_array().unwrap() {
        let diag = entry["lam"] == entry["mu"];
        let coeffs = entry["value"].as_array().unwrap();
        if diag {
            assert_eq!(coeffs.len(), 1);
            assert_eq!(coeffs[0]["num"], "1");
        } else {
            assert!(coeffs.is_empty(), "off-diagonal {entry}");
        }
    }
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let dirs = dir.path().to_str().unwrap();
    let args = [
        "compute",
        "--family",
        "f",
        "--lambda",
        "[2,1]",
        "--n",
        "2",
        "--D",
        "3",
        "--cache-dir",
        dirs,
    ];
    let first = sqwhit(&args);
    assert!(first.status.success());
    let cached: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(cached.len(), 1);
    let second = sqwhit(&args);
    assert_eq!(
        first.stdout, second.stdout,
        "cache hit must be byte-identical"
    );

    // different D misses the cache (a second entry appears)
    let other = sqwhit(&[
        "compute",
        "--family",
        "f",
        "--lambda",
        "[2,1]",
        "--n",
        "2",
        "--D",
        "2",
        "--cache-dir",
        dirs,
    ]);
    assert!(other.status.success());
    assert_ne!(first.stdout, other.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);

    // corrupt entry: warn, recompute, same output
    std::fs::write(&cached[0], b"{ not json").unwrap();
    let third = sqwhit(&args);
    assert!(third.status.success());
    assert!(String::from_utf8_lossy(&third.stderr).contains("corrupt cache entry"));
    assert_eq!(first.stdout, third.stdout);
}

#[test]
fn cache_env_variable() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sqwhit"))
        .args([
            "compute", "--family", "qW", "--lambda", "[1]", "--n", "2", "--D", "3",
        ])
        .env("SQWHIT_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn rational_params_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("vals.json");
    std::fs::write(&file, r#"{"q": "1/2", "a": ["1/3"], "b": ["1/5"]}"#).unwrap();
    let out = sqwhit(&[
        "compute",
        "--family",
        "f",
        "--lambda",
        "[1]",
        "--n",
        "2",
        "--D",
        "4",
        "--params",
        file.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    // f_(1,0) at these values: coefficient of m_(1) is 1/(1 - a1 b1) = 15/14
    let terms = v["poly"]["terms"].as_array().unwrap();
    let m1 = terms
        .iter()
        .find(|t| t["mu"] == serde_json::json!([1]))
        .expect("m_(1) present");
    assert_eq!(m1["coeff"][0]["num"], "15");
    assert_eq!(m1["coeff"][0]["den"], "14");
}

#[test]
fn verify_csv_format() {
    let out = sqwhit(&[
        "verify",
        "--suite",
        "stability",
        "--n",
        "2",
        "--box",
        "2,2",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("case,expected,got,pass"));
    assert!(text.contains("stability n=2"));
}

#[test]
fn verify_with_jobs_flag() {
    let out = sqwhit(&[
        "verify",
        "--suite",
        "orthogonality",
        "--n",
        "2",
        "--box",
        "2,2",
        "--D",
        "4",
        "--jobs",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
}
