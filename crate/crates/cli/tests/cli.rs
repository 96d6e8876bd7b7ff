use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use symetric::csg::{eval, parse, Scene};

fn symetric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symetric")).args(args).env_remove("SYMETRIC_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_errors(report: &Value) -> Vec<String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../report.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    let errors: Vec<String> = match compiled.validate(report) {
        Ok(()) => Vec::new(),
        Err(errs) => errs.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    errors
}

#[test]
fn eval_then_synth_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("c.scene");
    let out = symetric(&["eval", "(circle 4 8 4)", "--canvas", "16x16", "--out", scene.to_str().unwrap()]);
    assert!(out.status.success());
    let prog = dir.path().join("c.csg");
    let out = symetric(&["synth", scene.to_str().unwrap(), "--epsilon", "0.2", "--beam-width", "200", "--out", prog.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let p = parse(&fs::read_to_string(&prog).unwrap()).unwrap();
    let goal = Scene::parse(&fs::read_to_string(&scene).unwrap()).unwrap();
    assert_eq!(eval(&p, goal.canvas()), goal);
    assert_eq!(p.node_count(), 1);
}

#[test]
fn render_draws_ascii() {
    let out = symetric(&["render", "(rect 0 0 1 1)", "--canvas", "3x3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "##.\n##.\n...\n");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(symetric(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(symetric(&["eval"]).status.code(), Some(2));
    assert_eq!(symetric(&["eval", "(circle 1 1", "--canvas", "8x8"]).status.code(), Some(2));
}

#[test]
fn unsolvable_within_budget_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("two.scene");
    let two = symetric(&["eval", "(union (rect 0 0 2 2) (rect 10 10 14 14))", "--canvas", "16x16", "--out", scene.to_str().unwrap()]);
    assert!(two.status.success());
    let out = symetric(&["synth", scene.to_str().unwrap(), "--max-cost", "1", "--repair-steps", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_bench_is_reproducible_and_env_seed_applies() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = ["gen-bench", "--count", "3", "--size", "3-5", "--depth", "2-4", "--canvas", "8x8"];
    let mut first: Vec<&str> = args.to_vec();
    first.extend(["--seed", "11", "--out-dir", a.to_str().unwrap()]);
    assert!(symetric(&first).status.success());
    let mut second: Vec<&str> = args.to_vec();
    second.extend(["--out-dir", b.to_str().unwrap()]);
    let out = Command::new(env!("CARGO_BIN_EXE_symetric")).args(&second).env("SYMETRIC_SEED", "11").output().unwrap();
    assert!(out.status.success());
    for name in ["gen00.csg", "gen01.scene", "gen02.csg", "manifest.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn bench_report_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("gen");
    let gen = symetric(&["gen-bench", "--count", "2", "--size", "3-4", "--depth", "2-3", "--canvas", "8x8", "--seed", "5", "--out-dir", corpus.to_str().unwrap()]);
    assert!(gen.status.success());
    let report = dir.path().join("out.json");
    let out = symetric(&[
        "bench", "--corpus", corpus.to_str().unwrap(), "--algo", "symetric", "--repeats", "5", "--max-cost", "5",
        "--timeout", "60", "--report", report.to_str().unwrap(),
    ]);
    assert!(out.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("Success %"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(schema_errors(&v), Vec::<String>::new());
    assert_eq!(v["records"].as_array().unwrap().len(), 10);
    assert_eq!(v["algorithm"], "symetric");

    let basic = dir.path().join("basic.json");
    let out = symetric(&["bench", "--corpus", corpus.to_str().unwrap(), "--algo", "fta-basic", "--repeats", "5", "--max-cost", "3", "--report", basic.to_str().unwrap()]);
    assert!(out.status.code().is_some_and(|c| c <= 1));
    let v: Value = serde_json::from_str(&fs::read_to_string(&basic).unwrap()).unwrap();
    assert_eq!(schema_errors(&v), Vec::<String>::new());
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
}

#[test]
fn schema_rejects_malformed_reports() {
    let bad = serde_json::json!({ "algorithm": "sketch", "repeats": 0 });
    assert!(!schema_errors(&bad).is_empty());
}

#[test]
fn cluster_study_emits_csv() {
    let out = symetric(&["cluster-study", "--n-max", "2", "--epsilons", "0.1,0.2", "--canvas", "16x16"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,total,distinct,clusters_eps0.1,clusters_eps0.2"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn canvas_flag_is_validated() {
    assert_eq!(symetric(&["render", "(rect 0 0 1 1)", "--canvas", "0x3"]).status.code(), Some(2));
}
