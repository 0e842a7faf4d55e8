//! End-to-end checks of the `trl` binary: piping, exit codes, JSON shapes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn trl(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_trl"));
    cmd.args(args);
    cmd.stdin(Stdio::piped());
    cmd.stdout(Stdio::piped());
    cmd.stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("spawn trl");
    if let Some(text) = stdin {
        child
            .stdin
            .as_mut()
            .unwrap()
            .write_all(text.as_bytes())
            .expect("write stdin");
    }
    drop(child.stdin.take());
    child.wait_with_output().expect("wait trl")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn generate_analyze_pipeline() {
    let gen = trl(&["generate", "z2-counterexample"], None);
    let tensor = String::from_utf8(gen.stdout).unwrap();
    let rep = stdout_json(&trl(&["analyze"], Some(&tensor)));
    assert_eq!(rep["rank_a"], 2);
    assert_eq!(rep["rank"]["value"], 2);
    assert_eq!(rep["srank"]["value"], 3);
}

#[test]
fn census_gf2_counts() {
    let rep = stdout_json(&trl(&["census", "--field", "gf2", "--d", "3", "--n", "2"], None));
    assert_eq!(rep["total_symmetric"], 16);
    assert_eq!(rep["expressible_nonzero"], 7);
}

#[test]
fn border_pipeline_on_w() {
    let gen = trl(&["generate", "w-tensor", "--field", "complex128"], None);
    let tensor = String::from_utf8(gen.stdout).unwrap();
    let rep = stdout_json(&trl(&["border", "--eps", "0.01"], Some(&tensor)));
    assert_eq!(rep["border_rank_2"], true);
    assert!(rep["form"]["residual"].as_f64().unwrap() <= 1e-10);
    let err = rep["curve"][0]["error"].as_f64().unwrap();
    assert!((err - 0.017321).abs() < 5e-7);
}

#[test]
fn decompose_rational_cubic() {
    let tensor = serde_json::json!({
        "order": 3, "dim": 2, "field": "rational",
        "entries": [2, 1, 1, 1, 1, 1, 1, 0],
    })
    .to_string();
    let rep = stdout_json(&trl(&["decompose"], Some(&tensor)));
    assert_eq!(rep["term_count"], 3);
    assert_eq!(rep["trace"][0]["case"], "1");
    let terms = rep["decomposition"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
}

#[test]
fn sweep_json_shape() {
    let rep = stdout_json(&trl(
        &["sweep", "--theorem", "rank2eq", "--field", "gf3", "--d", "3", "--n", "2"],
        None,
    ));
    assert_eq!(rep["theorem"], "rank2eq");
    assert_eq!(rep["total"], 81);
    assert_eq!(rep["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn approx_on_w() {
    let gen = trl(&["generate", "w-tensor", "--field", "float64"], None);
    let tensor = String::from_utf8(gen.stdout).unwrap();
    let rep = stdout_json(&trl(&["approx", "--seed", "7"], Some(&tensor)));
    let sigma = rep["rank_one"]["sigma"].as_f64().unwrap().abs();
    assert!((sigma - 2.0 / 3.0f64.sqrt()).abs() < 1e-6);
    assert!(rep["banach"]["residual_gap"].as_f64().unwrap() >= -1e-8);
}

#[test]
fn exit_codes() {
    // bad input file
    let out = trl(&["analyze", "/nonexistent/file.json"], None);
    assert_eq!(out.status.code(), Some(2));
    // malformed JSON on stdin
    let out = trl(&["analyze"], Some("{not json"));
    assert_eq!(out.status.code(), Some(2));
    // decompose over gf2 is an unsupported field
    let tensor = serde_json::json!({
        "order": 3, "dim": 2, "field": "gf2",
        "entries": [0, 1, 1, 0, 1, 0, 0, 0],
    })
    .to_string();
    let out = trl(&["decompose"], Some(&tensor));
    assert_eq!(out.status.code(), Some(4));
    // sampling without a seed is rejected (no hidden entropy)
    let out = trl(
        &["sweep", "--theorem", "maintheo", "--field", "gf3", "--d", "3", "--n", "2", "--samples", "10"],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    // a tiny budget trips the census
    let out = trl(
        &["census", "--field", "gf3", "--d", "3", "--n", "3", "--budget", "4"],
        None,
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn certify_flag_attaches_a_kruskal_certificate() {
    let dir = std::env::temp_dir().join(format!("trl-certify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cert_path = dir.join("dec.json");
    // e1^3 + e2^3 + (1,1)^3 over GF(3)
    std::fs::write(
        &cert_path,
        serde_json::json!({
            "field": "gf3", "order": 3, "dim": 2, "symmetric": true,
            "terms": [
                {"coefficient": 1, "vector": [1, 0]},
                {"coefficient": 1, "vector": [0, 1]},
                {"coefficient": 1, "vector": [1, 1]},
            ],
        })
        .to_string(),
    )
    .unwrap();
    let tensor = serde_json::json!({
        "order": 3, "dim": 2, "field": "gf3",
        "entries": [2, 1, 1, 1, 1, 1, 1, 2],
    })
    .to_string();
    let rep = stdout_json(&trl(
        &["analyze", "--certify", cert_path.to_str().unwrap()],
        Some(&tensor),
    ));
    assert_eq!(rep["kruskal"]["r"], 3);
    assert_eq!(rep["kruskal"]["kranks"], serde_json::json!([2, 2, 2]));
    assert_eq!(rep["kruskal"]["condition_met"], false);
    // the exhaustive oracle still pins the rank
    assert_eq!(rep["rank"]["method"], "exhaustive");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("trl-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tensor.json");
    let out = trl(
        &[
            "generate",
            "random-sym",
            "--field",
            "gf3",
            "--d",
            "3",
            "--n",
            "2",
            "--seed",
            "5",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["field"], "gf3");
    std::fs::remove_dir_all(&dir).ok();
}
