use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::io::Write;

use serde_json::Value;
use tempfile::TempDir;

fn cffa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cffa")).args(args).output().expect("binary runs")
}

fn cffa_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cffa"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn answer(o: &Output) -> String {
    let v: Value = serde_json::from_str(stdout(o).trim()).expect("stdout is one document");
    v["answer"].as_str().unwrap().to_string()
}

fn instance_doc(variant: &str, m: usize, n: usize, utilities: &[Vec<u64>], edges: &[(usize, usize)], eta: u64) -> String {
    serde_json::json!({
        "variant": variant,
        "size_bound": null,
        "n_agents": n,
        "n_jobs": m,
        "utilities": utilities,
        "conflict_edges": edges.iter().map(|&(u, v)| [u, v]).collect::<Vec<_>>(),
        "eta": eta,
    })
    .to_string()
}

#[test]
fn auto_routes_complete_conflict_graphs_to_matching() {
    let dir = TempDir::new().unwrap();
    let edges: Vec<_> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
    let inst = write(&dir, "k4.json", &instance_doc("partial", 4, 2, &[vec![3, 0, 1, 0], vec![0, 2, 0, 2]], &edges, 2));
    for algo in ["auto", "oracle"] {
        let o = cffa(&["solve", "--algo", algo, arg(&inst)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(answer(&o), "yes");
    }
    let o = cffa(&["solve", arg(&inst)]);
    assert!(stderr(&o).contains("solver: s1"), "{}", stderr(&o));

    let result = write(&dir, "r.json", &stdout(&o));
    let v = cffa(&["verify", arg(&inst), arg(&result)]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).is_empty());
}

#[test]
fn wide_instances_exceed_the_mask_solver() {
    let dir = TempDir::new().unwrap();
    let m = 70;
    let inst = write(&dir, "wide.json", &instance_doc("partial", m, 1, &[vec![1; m]], &[], 1));
    let o = cffa(&["solve", "--algo", "hwpoly", arg(&inst)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mask width exceeded"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", &instance_doc("complete", 3, 2, &[vec![2, 1, 0], vec![0, 1, 2]], &[(0, 2)], 2));
    let good = write(&dir, "good.json", r#"{"answer":"yes","assignment":{"0":0,"1":1,"2":1}}"#);
    let short = write(&dir, "short.json", r#"{"answer":"yes","assignment":{"0":0,"2":1}}"#);
    let broken = write(&dir, "broken.json", r#"{"answer":"maybe"}"#);
    assert_eq!(cffa(&["verify", arg(&inst), arg(&good)]).status.code(), Some(0));
    let o = cffa(&["verify", arg(&inst), arg(&short)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("invalid"));
    assert_eq!(cffa(&["verify", arg(&inst), arg(&broken)]).status.code(), Some(2));
    assert_eq!(cffa(&["verify", arg(&inst), "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn kernelize_refuses_degree_rule_on_dense_complete_instances() {
    let dir = TempDir::new().unwrap();
    // Path 0–1–2 has d = 2 ≥ n = 2.
    let inst = write(&dir, "p.json", &instance_doc("complete", 3, 2, &[vec![1; 3], vec![1; 3]], &[(0, 1), (1, 2)], 1));
    let o = cffa(&["kernelize", "--rule", "degree", arg(&inst)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not applicable"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn kernelize_writes_reduced_instance_and_report() {
    let dir = TempDir::new().unwrap();
    let m = 12;
    let inst = write(&dir, "big.json", &instance_doc("partial", m, 1, &[vec![1; m]], &[], 2));
    let o = cffa(&["kernelize", "--rule", "degree", arg(&inst)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let reduced: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(reduced["n_jobs"], 2);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("big.json.kernel-report.json")).unwrap()).unwrap();
    assert_eq!(report["rule"], "degree");
    assert_eq!(report["surviving_jobs"], 2);
    assert_eq!(report["job_map"], serde_json::json!([0, 1]));

    let reduced_path = write(&dir, "reduced.json", &stdout(&o));
    assert_eq!(answer(&cffa(&["solve", arg(&reduced_path)])), "yes");

    let custom = dir.path().join("custom.json");
    let o = cffa(&["kernelize", "--rule", "ramsey", "--r", "2", "--report", arg(&custom), arg(&inst)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(&custom).unwrap().contains("\"rule\": \"ramsey\""));
}

#[test]
fn coloring_pipeline_on_k4() {
    let g = r#"{"vertices":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#;
    let generated = cffa(&["generate", "--from", "coloring", "--source", g, "--k", "3"]);
    assert_eq!(generated.status.code(), Some(0), "{}", stderr(&generated));
    let o = cffa_stdin(&["solve", "-"], &stdout(&generated));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(answer(&o), "no");

    let generated = cffa(&["generate", "--from", "coloring", "--source", g, "--k", "4"]);
    let o = cffa_stdin(&["solve", "-"], &stdout(&generated));
    assert_eq!(answer(&o), "yes");
}

#[test]
fn partition_pipeline() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "p.json", "[1, 2, 3]");
    let generated = cffa(&["generate", "--from", "partition", "--source", &format!("@{}", arg(&src))]);
    assert_eq!(generated.status.code(), Some(0), "{}", stderr(&generated));
    let inst = write(&dir, "inst.json", &stdout(&generated));
    let o = cffa(&["solve", "--algo", "hwpoly", arg(&inst)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(answer(&o), "yes");
    let r = write(&dir, "r.json", &stdout(&o));
    assert_eq!(cffa(&["verify", arg(&inst), arg(&r)]).status.code(), Some(0));

    let generated = cffa(&["generate", "--from", "partition", "--source", "[1, 1, 3]"]);
    let o = cffa_stdin(&["solve", "--algo", "hwpoly", "-"], &stdout(&generated));
    assert_eq!(answer(&o), "no");
}

#[test]
fn other_generators() {
    let is = cffa(&["generate", "--from", "is", "--source", r#"{"vertices":3,"edges":[[0,1],[1,2]]}"#, "--k", "2", "--is-flavor", "sb-complete"]);
    assert_eq!(answer(&cffa_stdin(&["solve", "-"], &stdout(&is))), "yes");
    let dm = cffa(&["generate", "--from", "3dm", "--source", r#"{"z_count":2,"tuples":[[0,0,0],[1,1,0],[1,0,1],[0,0,1]]}"#, "--dm-flavor", "two-clique"]);
    assert_eq!(dm.status.code(), Some(0), "{}", stderr(&dm));
    assert_eq!(answer(&cffa_stdin(&["solve", "-"], &stdout(&dm))), "yes");

    let profile = r#"{"m":9,"n":2,"completeness":"partial","edge_probability":0.3,"utility_range":[0,5],
        "eta_rule":{"kind":"fixed","value":3},"structure":{"kind":"free"}}"#;
    let a = cffa(&["generate", "--from", "random", "--source", profile, "--seed", "5"]);
    let b = cffa(&["generate", "--from", "random", "--source", profile, "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stderr(&a).contains("seed: 5"));

    let bad = cffa(&["generate", "--from", "coloring", "--source", r#"{"vertices":2,"edges":[[0,5]]}"#, "--k", "2"]);
    assert_eq!(bad.status.code(), Some(2));
    let missing_k = cffa(&["generate", "--from", "is", "--source", r#"{"vertices":2}"#]);
    assert_eq!(missing_k.status.code(), Some(2));
}

#[test]
fn forced_solver_with_failed_precondition_exits_two() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "c.json", &instance_doc("complete", 3, 1, &[vec![1; 3]], &[(0, 1)], 1));
    let o = cffa(&["solve", "--algo", "colorcode-det", arg(&inst)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("partial"), "{}", stderr(&o));
}

#[test]
fn budget_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let m = 14;
    let inst = write(&dir, "i.json", &instance_doc("partial", m, 3, &vec![vec![1; m]; 3], &[], 4));
    let o = Command::new(env!("CARGO_BIN_EXE_cffa"))
        .args(["solve", "--algo", "oracle", arg(&inst)])
        .env("CFFA_BUDGET_NODES", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget exceeded"), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_cffa"))
        .args(["solve", arg(&inst)])
        .env("CFFA_BUDGET_SECONDS", "soon")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_emits_header_and_records() {
    let dir = TempDir::new().unwrap();
    let suite = write(
        &dir,
        "suite.json",
        r#"{"seed": 4, "solvers": ["hwpoly", "auto"], "profiles": [
            {"count": 5, "m": 6, "n": 2, "completeness": "complete", "edge_probability": 0.3,
             "utility_range": [0, 4], "eta_rule": {"kind": "fixed", "value": 2}, "structure": {"kind": "free"}}]}"#,
    );
    let o = cffa(&["bench", "--suite", arg(&suite)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 11);
    assert_eq!(lines[0]["seed"], 4);
    for rec in &lines[1..] {
        for key in ["instanceId", "solver", "answer", "verified", "micros"] {
            assert!(rec.get(key).is_some(), "missing {key} in {rec}");
        }
    }
}
