use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumideal")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sumideal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn density_reports_versioned_json() {
    let out = run(&["density", "--set", "ap(1,2)", "--which", "ud", "--N", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "density");
    let d = v["estimate"]["value"].as_f64().unwrap();
    assert!((d - 0.5).abs() < 1e-3);
}

#[test]
fn density_csv_has_checkpoint_columns() {
    let out = run(&["density", "--set", "squares", "--N", "5000", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("checkpoint_n,ratio,value,stability"));
    assert!(text.lines().count() > 10);
}

#[test]
fn relative_density_needs_a_reference() {
    let out = run(&["density", "--set", "ap(1,4)", "--which", "rel", "--rel-to", "ap(1,2)", "--N", "10000"]);
    let v = json(&out);
    assert!((v["estimate"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert_eq!(run(&["density", "--set", "ap(1,4)", "--which", "rel"]).status.code(), Some(2));
}

#[test]
fn ideal_verdicts() {
    let v = json(&run(&["ideal", "--f", "one", "--set", "{1,2,3}", "--N", "1000"]));
    assert_eq!(v["diagnosis"]["verdict"], "in_ideal_certified");
    let v = json(&run(&["ideal", "--f", "reciprocal", "--set", "ap(1,1)", "--N", "1000000"]));
    let p = v["diagnosis"]["partial_sum"].as_f64().unwrap();
    assert!((p - 14.392726722865).abs() < 1e-6, "{p}");
    let v = json(&run(&["ideal", "tadcheck", "--A", "ap(2,2)", "--B", "ap(4,4)", "--K", "0", "--N", "10000"]));
    assert_eq!(v["outcome"], "not_tad");
}

#[test]
fn dip_reads_a_chain_file() {
    let path = scratch("chain.txt");
    std::fs::write(&path, "ap(2,2)\nap(4,4)\nap(8,8)\n").unwrap();
    let out = run(&["ideal", "dip", "--f", "reciprocal", "--chain", path.to_str().unwrap(), "--stages", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["milestones_hold"], true);
    assert_eq!(v["stage_ends"].as_array().unwrap().len(), 3);
}

#[test]
fn skeleton_files_round_trip() {
    let path = scratch("skeleton.json");
    let p = path.to_str().unwrap();
    let out = run(&["tad", "build", "--closed-form", "fin", "--budget", "3000", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for key in ["g", "h", "n_m", "l_m", "provenance"] {
        assert!(file.get(key).is_some(), "missing {key}");
    }
    let v = json(&run(&["tad", "member", "--skeleton", p, "--sigma", "0", "--depth", "1"]));
    assert_eq!(v["elements"], serde_json::json!([1, 2]));
    let v = json(&run(&["tad", "member", "--skeleton", p, "--sigma", "1", "--depth", "1"]));
    assert_eq!(v["elements"], serde_json::json!([1, 5]));
}

#[test]
fn constructed_skeleton_builds() {
    let v = json(&run(&["tad", "build", "--f", "one", "--stages", "5", "--budget", "100000"]));
    assert_eq!(v["skeleton"]["provenance"], "constructed");
    assert_eq!(v["invariants"]["nondecreasing_gaps"], true);
}

#[test]
fn verify_exit_codes_follow_expectations() {
    let args = ["tad", "verify", "--skeleton", "closed_form_fin", "--sigmas", "000000,100000,010000", "--K", "3"];
    assert_eq!(run(&args).status.code(), Some(0));
    let mut expecting = args.to_vec();
    expecting.push("--expect-violations");
    assert_eq!(run(&expecting).status.code(), Some(1));
    let dup = ["tad", "verify", "--skeleton", "closed_form_fin", "--sigmas", "0101,0101"];
    assert_eq!(run(&dup).status.code(), Some(2));
}

#[test]
fn delta_on_the_default_family() {
    let v = json(&run(&["delta", "eval", "--set", "ap(1,1)", "--N", "200000"]));
    assert_eq!(v["delta"]["value"].as_f64(), Some(1.0));
    let v = json(&run(&["delta", "eval", "--set", "{1,2,3}", "--N", "200000"]));
    assert_eq!(v["delta"]["value"].as_f64(), Some(0.0));
    let v = json(&run(&["delta", "rich", "--r", "0.7", "--N", "200000"]));
    let got = v["delta"]["value"].as_f64().unwrap();
    assert!((got - 0.7).abs() <= 0.05, "{got}");
    assert_eq!(run(&["delta", "rich", "--r", "1.5"]).status.code(), Some(2));
}

#[test]
fn gallery_reports_the_monotonicity_witness() {
    let args = ["gallery", "run", "--which", "prop1ii", "--N", "100000"];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("ap(4,4)") && text.contains("ap(2,2)"), "{text}");
    let mut expecting = args.to_vec();
    expecting.push("--expect-violations");
    assert_eq!(run(&expecting).status.code(), Some(0));
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(run(&["density", "--set", "ap("]).status.code(), Some(2));
    assert_eq!(run(&["ideal", "--f", "cubic", "--set", "ap(1,1)"]).status.code(), Some(2));
    assert_eq!(run(&["tad", "member", "--skeleton", "/nonexistent.json", "--sigma", "0", "--depth", "1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    let err = String::from_utf8(run(&["density", "--set", "ap("]).stderr).unwrap();
    assert!(err.contains("parse error"), "{err}");
}

#[test]
fn identical_arguments_give_identical_bytes() {
    let corpus = scratch("corpus.txt");
    std::fs::write(&corpus, "ap(1,2)\nap(2,2)\nunion(ap(1,2),{2,4})\nblocks(w1)\nshift(blocks(w2),3)\n").unwrap();
    let args = ["delta", "axioms", "--corpus", corpus.to_str().unwrap(), "--N", "100000"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}
