use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn xnlplab(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_xnlplab"));
    cmd.args(args).env_remove("XNLPLAB_BUDGET");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn path_str(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

const SMALL_MACHINE: &str = r#"{"k":1,"n":1,"r":1,"checks":[[1,0,1,0]]}"#;

#[test]
fn reduce_to_gadget_and_solve_it() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "m.json", SMALL_MACHINE);
    let out = path_str(&dir, "dag.json");
    let o = xnlplab(&["reduce", "nnccm-to-dag", &input, &out], &[]);
    assert!(o.status.success(), "{o:?}");
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((value["graph"]["n"].as_u64(), value["b"].as_u64()), (Some(43), Some(7)));

    let witness = path_str(&dir, "order.json");
    let o = xnlplab(&["solve", "bandwidth", &out, "--witness", &witness], &[]);
    assert_eq!(stdout(&o).trim(), "yes");
    assert!(Path::new(&witness).exists());

    let dot = path_str(&dir, "tree.dot");
    assert!(xnlplab(&["reduce", "nnccm-to-tree", &input, &dot], &[]).status.success());
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "m.json", SMALL_MACHINE);
    assert_eq!(xnlplab(&["reduce", "no-such-kind", &input], &[]).status.code(), Some(2));
    let broken = write(&dir, "broken.json", "{\"k\":");
    assert_eq!(xnlplab(&["reduce", "nnccm-to-shuffle", &broken], &[]).status.code(), Some(2));
    let missing = path_str(&dir, "missing.json");
    assert_eq!(xnlplab(&["solve", "shuffle", &missing], &[]).status.code(), Some(2));
    let zero = write(&dir, "zero.json", r#"{"k":1,"n":0,"r":1,"checks":[[1,0,1,0]]}"#);
    assert_eq!(xnlplab(&["reduce", "nnccm-to-dag", &zero], &[]).status.code(), Some(3));
    let p2 = write(&dir, "p2.json", r#"{"m":2,"D":1,"jobs":[{"p":1,"size":1}]}"#);
    assert_eq!(xnlplab(&["reduce", "parallel-to-mindelay", &p2], &[]).status.code(), Some(3));
}

#[test]
fn solve_answers() {
    let dir = TempDir::new().unwrap();
    let fig = write(&dir, "fig.json", r#"{"sources":["cbaa","abc","ca"],"target":"acbbcaaac"}"#);
    let witness = path_str(&dir, "w.json");
    let o = xnlplab(&["solve", "shuffle", &fig, "--witness", &witness], &[]);
    assert_eq!(stdout(&o).trim(), "yes");
    let triples: Vec<[usize; 3]> = serde_json::from_str(&fs::read_to_string(&witness).unwrap()).unwrap();
    assert_eq!(triples.len(), 9);

    let star = write(&dir, "star.json", r#"{"n":4,"arcs":[[0,1],[0,2],[0,3]]}"#);
    assert_eq!(stdout(&xnlplab(&["solve", "bandwidth", &star, "-b", "2"], &[])).trim(), "no");
    assert_eq!(stdout(&xnlplab(&["solve", "bandwidth", &star, "-b", "3"], &[])).trim(), "yes");

    let bins = write(&dir, "bp.json", r#"{"B":3,"k":2,"items":[2,2,2]}"#);
    assert_eq!(stdout(&xnlplab(&["solve", "binpack", &bins], &[])).trim(), "no");
    let chain = write(&dir, "chain.json", r#"{"m":1,"D":3,"jobs":[{"p":1,"size":1},{"p":1,"size":1},{"p":1,"size":1}],"prec":[{"from":0,"to":1,"kind":"none"},{"from":1,"to":2,"kind":"none"}]}"#);
    assert_eq!(stdout(&xnlplab(&["solve", "sched", &chain], &[])).trim(), "yes");
    assert_eq!(stdout(&xnlplab(&["solve", "sched", &chain, "--deadline", "2"], &[])).trim(), "no");
}

#[test]
fn budget_from_environment() {
    let dir = TempDir::new().unwrap();
    let wide = write(&dir, "wide.json", r#"{"n":30,"arcs":[]}"#);
    let o = xnlplab(&["solve", "bandwidth", &wide, "-b", "3"], &[("XNLPLAB_BUDGET", "2")]);
    assert_eq!((o.status.code(), stdout(&o).trim().to_owned()), (Some(0), "timeout".to_owned()));
    let o = xnlplab(&["solve", "bandwidth", &wide, "-b", "3"], &[]);
    assert_eq!(stdout(&o).trim(), "yes");
}

#[test]
fn reports_are_stable() {
    let dir = TempDir::new().unwrap();
    let a = path_str(&dir, "a.json");
    let b = path_str(&dir, "b.json");
    for path in [&a, &b] {
        let o = xnlplab(&["verify", "oracle-agreement", "--cases", "40", "--seed", "5", "--report", path], &[]);
        assert!(o.status.success(), "{o:?}");
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(report["summary"]["disagree"], 0);
    assert_eq!(report["summary"]["total"].as_u64().unwrap() as usize, report["records"].as_array().unwrap().len());
}

#[test]
fn failing_sweep_exits_four() {
    let o = xnlplab(&["verify", "dag-reduction"], &[]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("disagree k=1 n=1 checks=[(1,1,1,1),(1,0,1,0)]"));
}

#[test]
fn generate_and_export() {
    let dir = TempDir::new().unwrap();
    let g = path_str(&dir, "cat.json");
    assert!(xnlplab(&["gen", "caterpillar", "--size", "6", "--out", &g], &[]).status.success());
    let o = xnlplab(&["export-dot", &g, "-", "--name", "cat"], &[]);
    assert!(stdout(&o).starts_with("digraph cat"));
    let m = write(&dir, "m.json", SMALL_MACHINE);
    let o = xnlplab(&["export-dot", &m, "--gadget", "dag"], &[]);
    assert!(stdout(&o).contains("->"));
    let first = stdout(&xnlplab(&["gen", "nnccm", "--seed", "3"], &[]));
    assert_eq!(first, stdout(&xnlplab(&["gen", "nnccm", "--seed", "3"], &[])));
}
