use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sigpatrol::io::{parse_instance, serialize_instance};

const PATH7: &str = r#"{
  "vertices": ["a", "b", "c", "d", "e", "f", "g"],
  "edges": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "e"], ["e", "f"], ["f", "g"]],
  "targets": [
    {"id": "a", "value": 0.9, "deadline": 1},
    {"id": "c", "value": 0.4, "deadline": 1},
    {"id": "e", "value": 0.7, "deadline": 1},
    {"id": "g", "value": 0.6, "deadline": 1}
  ]
}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigpatrol"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn malformed_instance_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"vertices":["a"],"edges":[],"targets":[{"id":"a","value":0.5}]}"#, "deadline"),
        (r#"{"vertices":["a"],"edges":[],"targets":[{"id":"a","value":0.5,"deadline":1,"weight":2}]}"#, "weight"),
        (r#"{"vertices":["a"],"edges":[["a","a","1"]],"targets":[]}"#, "edges"),
    ];
    for (i, (text, key)) in cases.iter().enumerate() {
        let name = format!("bad{i}.json");
        fs::write(dir.path().join(&name), text).unwrap();
        let out = run(dir.path(), &["mincover", &name]);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(2), "{stderr}");
        assert!(stderr.contains(key), "{key}: {stderr}");
    }
}

#[test]
fn gen_writes_a_loadable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["gen", "--targets", "20", "--seed", "5", "--out", "o"]);
    assert!(out.status.success());
    let path = dir.path().join("o/instance_n20_s5.json");
    let file = json(&path);
    assert_eq!(file["vertices"].as_array().unwrap().len(), 20);
    assert_eq!(file["targets"].as_array().unwrap().len(), 20);
    assert!(file["targets"].as_array().unwrap().iter().all(|t| t["deadline"] == 3));
    assert_eq!(file["manifest"]["command"], "gen");
    assert_eq!(file["manifest"]["seed"], 5);
    // the written file loads and survives a round trip
    let parsed = parse_instance(&fs::read_to_string(&path).unwrap()).unwrap();
    let again = parse_instance(&serialize_instance(&parsed)).unwrap();
    assert_eq!(parsed, again);
}

#[test]
fn tree_recursion_agrees_with_exact_on_a_path() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("path.json"), PATH7).unwrap();
    for method in ["tree", "exact", "auto"] {
        let out = run(dir.path(), &["mincover", "path.json", "--method", method, "--out", method]);
        assert!(out.status.success());
        let file = json(&dir.path().join(method).join("mincover.json"));
        assert_eq!(file["m"], 2, "{method}");
        assert_eq!(file["optimal"], true);
        assert_eq!(file["positions"], serde_json::json!(["b", "f"]));
    }
}

#[test]
fn resolve_trace_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let gen = run(dir.path(), &["gen", "--targets", "14", "--seed", "2", "--out", "."]);
    assert!(gen.status.success());
    let out = run(
        dir.path(),
        &["resolve", "instance_n14_s2.json", "--budget", "30s", "--max-placements", "6", "--out", "r"],
    );
    assert!(matches!(out.status.code(), Some(0 | 3)), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("r/report.json"));
    let trace = report["trace"].as_array().unwrap();
    assert!(!trace.is_empty());
    for oracle in ["FC", "PC", "NC"] {
        let incumbents: Vec<f64> = trace
            .iter()
            .filter(|e| e["oracle"] == oracle)
            .map(|e| e["incumbent"].as_f64().unwrap())
            .collect();
        assert!(incumbents.windows(2).all(|w| w[1] >= w[0]), "{oracle}: {incumbents:?}");
    }
    let csv = fs::read_to_string(dir.path().join("r/trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), trace.len() + 1);
}
