mod common;

use std::path::Path;
use std::process::{Command, Output};

use cubefactor::Factorization;
use serde_json::Value;

use common::*;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubefactor"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["construct", "--k", "2", "--l", "3", "--out", "f.json"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("K_{2,3}: yes"));
    let r = report(&out);
    assert_eq!(r["exit_code"], 0);
    assert_eq!(r["result"]["d"], 5);

    let text = std::fs::read_to_string(dir.path().join("f.json")).unwrap();
    let f = Factorization::from_json(&text).unwrap();
    let t = tables(&f);
    assert!(is_factorization(5, &t));
    assert_eq!(perfection_edges(&t).len(), 6);

    let v = run(
        dir.path(),
        &["verify", "f.json", "--expect-complete-bipartite", "2", "3", "--expect-bipartite-perfection-graph", "--expect-sign", "1"],
    );
    assert_eq!(code(&v), 0);
    assert_eq!(report(&v)["result"]["passed"], true);
}

#[test]
fn failed_expectations_exit_3_with_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("q3.json"), Factorization::directional(cubefactor::Dimension::new(3).unwrap()).to_json())
        .unwrap();
    let v = run(dir.path(), &["verify", "q3.json", "--expect-complete-bipartite", "1", "2"]);
    assert_eq!(code(&v), 3);
    let r = report(&v);
    assert_eq!(r["exit_code"], 3);
    assert_eq!(r["result"]["passed"], false);
    assert!(r.to_string().contains("missing_cross_edge"));

    let v = run(dir.path(), &["verify", "q3.json", "--expect-sign", "-1"]);
    assert_eq!(code(&v), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&run(p, &["construct", "--k", "3", "--l", "3"])), 4);
    assert_eq!(code(&run(p, &["verify", "missing.json"])), 2);
    assert_eq!(code(&run(p, &["construct", "--k", "0", "--l", "3"])), 2);
    assert_eq!(code(&run(p, &["no-such-command"])), 2);
    std::fs::write(p.join("bad.json"), r#"{"d":2,"factors":[[1,0,3,2],[1,0,3,2]]}"#).unwrap();
    assert_eq!(code(&run(p, &["verify", "bad.json"])), 2);
    assert_eq!(
        code(&run(p, &["--budget-nodes", "10", "search", "factorization", "--d", "6", "--target", "k33-style:3,3", "--direction-respecting", "3"])),
        5
    );
    assert_eq!(
        code(&run(p, &["search", "factorization", "--d", "4", "--target", "k33-style:3,1", "--direction-respecting", "3"])),
        6
    );
    assert_eq!(code(&run(p, &["search", "directed-hamilton", "--d", "3"])), 6);
    assert_eq!(code(&run(p, &["--deterministic", "--budget-seconds", "1", "construct", "--k", "1", "--l", "1"])), 2);
}

#[test]
fn deterministic_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--deterministic", "--seed", "4", "--budget-nodes", "100000", "search", "factorization", "--d", "4", "--target", "complete-bipartite:3,1", "--out", "w.json"];
    let a = run(dir.path(), &args);
    let wa = std::fs::read(dir.path().join("w.json")).unwrap();
    let b = run(dir.path(), &args);
    let wb = std::fs::read(dir.path().join("w.json")).unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(wa, wb);
    assert!(report(&a).get("elapsed_seconds").is_none());

    let c = run(dir.path(), &["--deterministic", "construct", "--k", "2", "--l", "2"]);
    let d = run(dir.path(), &["--deterministic", "construct", "--k", "2", "--l", "2"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn checkpoint_resume_matches_an_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let search = ["search", "factorization", "--d", "6", "--target", "complete-bipartite:3,3", "--walk-length", "200"];
    let with_budget = |n: &str, cp: Option<&str>| {
        let mut args = vec!["--deterministic", "--seed", "2", "--budget-nodes", n];
        if let Some(cp) = cp {
            args.extend(["--checkpoint", cp]);
        }
        args.extend(search);
        run(p, &args)
    };
    let straight = with_budget("1500", None);
    assert_eq!(code(&straight), 5);

    let first = with_budget("600", Some("cp.json"));
    assert_eq!(code(&first), 5);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(p.join("cp.json")).unwrap()).unwrap();
    assert_eq!(saved["frontier"]["kind"], "random-walk");
    let resumed = with_budget("1500", Some("cp.json"));
    assert_eq!(code(&resumed), 5);
    assert_eq!(report(&resumed)["result"]["resumed"], true);
    assert_eq!(report(&resumed)["result"]["nodes_explored"], report(&straight)["result"]["nodes_explored"]);

    let again = with_budget("1500", Some("cp2.json"));
    assert_eq!(code(&again), 5);
    assert_eq!(std::fs::read(p.join("cp.json")).unwrap(), std::fs::read(p.join("cp2.json")).unwrap());
}

#[test]
fn mismatched_checkpoint_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let first = run(p, &["--budget-nodes", "10", "--checkpoint", "cp.json", "search", "factorization", "--d", "6", "--target", "k33-style:3,3", "--direction-respecting", "3"]);
    assert_eq!(code(&first), 5);
    let other = run(p, &["--budget-nodes", "20", "--checkpoint", "cp.json", "search", "factorization", "--d", "6", "--target", "complete-bipartite:3,3", "--direction-respecting", "3"]);
    assert_eq!(code(&other), 2);
}

#[test]
fn switch_derive_and_apply_rebuild_a_construction() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&run(p, &["construct", "--k", "2", "--l", "2", "--out", "f.json"])), 0);
    assert_eq!(code(&run(p, &["switch", "derive", "f.json", "--k", "2", "--out", "moves.json"])), 0);
    assert_eq!(code(&run(p, &["switch", "apply", "--moves", "moves.json", "--d", "4", "--out", "g.json"])), 0);
    let f = Factorization::from_json(&std::fs::read_to_string(p.join("f.json")).unwrap()).unwrap();
    let g = Factorization::from_json(&std::fs::read_to_string(p.join("g.json")).unwrap()).unwrap();
    assert_eq!(f, g);
    let list = run(p, &["switch", "list", "f.json"]);
    assert_eq!(code(&list), 0);
}

#[test]
fn enumerate_and_analyze_small_cubes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let e = run(p, &["enumerate", "--d", "3", "--matchings", "--count"]);
    assert_eq!(code(&e), 0);
    assert_eq!(report(&e)["result"]["perfect_matchings"], brute_matchings(3).len());
    let e = run(p, &["enumerate", "--d", "3", "--up-to-ordering", "--count"]);
    assert_eq!(code(&e), 0);
    let r = report(&e);
    assert_eq!(r["result"]["count"], 4);

    assert_eq!(code(&run(p, &["construct", "--k", "1", "--l", "2", "--out", "f.json"])), 0);
    let a = run(p, &["analyze", "f.json", "--dot", "g.dot", "--pair", "1", "2", "--pair-dot", "u.dot"]);
    assert_eq!(code(&a), 0);
    let dot = std::fs::read_to_string(p.join("g.dot")).unwrap();
    assert!(dot.starts_with("graph"));
    assert!(p.join("u.dot").exists());
}
