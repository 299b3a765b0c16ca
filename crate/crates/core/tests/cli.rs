use std::path::PathBuf;

use dyncolour::cli::{main_with, EXIT_INPUT, EXIT_OK, EXIT_VALIDATION};

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dyncolour-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn call(args: &[&str]) -> i32 {
    main_with(std::iter::once("dyncolour").chain(args.iter().copied()))
}

#[test]
fn clean_run_exits_zero_and_writes_json() {
    let s = scratch("ok.txt", "3\n+ 0 1\n+ 1 2\n- 0 1\n");
    let out = s.with_extension("json");
    assert_eq!(call(&["run", s.to_str().unwrap(), "--validate-every", "1", "--out", out.to_str().unwrap()]), EXIT_OK);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["updates"], 3);
    assert_eq!(report["final_edges"], 1);
    assert_eq!(report["validation_failures"], 0);
}

#[test]
fn malformed_input_exits_two() {
    let s = scratch("bad.txt", "3\n+ 0 1\n+ 0 1\n");
    assert_eq!(call(&["run", s.to_str().unwrap()]), EXIT_INPUT);
    assert_eq!(call(&["run", "/nonexistent/stream.txt"]), EXIT_INPUT);
    assert_eq!(call(&["run", s.to_str().unwrap(), "--epsilon", "2"]), EXIT_INPUT);
    let ov = scratch("ov.json", r#"{"nope": 3}"#);
    let good = scratch("good.txt", "2\n+ 0 1\n");
    assert_eq!(call(&["run", good.to_str().unwrap(), "--overrides", ov.to_str().unwrap()]), EXIT_INPUT);
    assert_eq!(call(&["frobnicate"]), EXIT_INPUT);
}

#[test]
fn engine_refusal_exits_one() {
    // A cap of 1 in direct mode cannot take a second edge at vertex 1.
    let s = scratch("cap.txt", "3\n+ 0 1\n+ 1 2\n");
    assert_eq!(call(&["run", s.to_str().unwrap(), "--mode", "direct", "--delta-max", "1"]), EXIT_VALIDATION);
}

#[test]
fn gen_then_bench_round_trip() {
    let dir = std::env::temp_dir().join(format!("dyncolour-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let stream = dir.join("gen.txt");
    let args = ["gen", "sliding-window", "--n", "50", "--steps", "400", "--seed", "4", "--window", "30"];
    assert_eq!(call(&[&args[..], &["--out", stream.to_str().unwrap()]].concat()), EXIT_OK);
    let first = std::fs::read_to_string(&stream).unwrap();
    assert_eq!(call(&[&args[..], &["--out", stream.to_str().unwrap()]].concat()), EXIT_OK);
    assert_eq!(std::fs::read_to_string(&stream).unwrap(), first);
    let rows = dir.join("bench.json");
    assert_eq!(
        call(&["bench", stream.to_str().unwrap(), "--modes", "direct,full", "--reps", "2", "--out", rows.to_str().unwrap()]),
        EXIT_OK
    );
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(rows).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(rows.as_array().unwrap().iter().all(|r| r["deterministic"] == true));
}
