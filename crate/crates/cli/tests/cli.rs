use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pfroots(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfroots"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_paper_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfroots(dir.path(), &["verify-paper"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 10);
    assert!(!text.contains("FAIL"));
}

#[test]
fn gen_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfroots(dir.path(), &["--seed", "7", "gen", "--buses", "3", "--count", "2", "--out", "nets"]);
    assert_eq!(out.status.code(), Some(0));
    let a = fs::read_to_string(dir.path().join("nets/random-n3-s7.json")).unwrap();
    pfroots(dir.path(), &["--seed", "7", "gen", "--buses", "3", "--out", "again"]);
    assert_eq!(fs::read_to_string(dir.path().join("again/random-n3-s7.json")).unwrap(), a);

    let out = pfroots(dir.path(), &["solve", "nets/random-n3-s8.json", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["record"]["num_paths"], 16);
    assert!(doc["record"]["num_finite_complex"].as_u64().unwrap() <= 6);
}

#[test]
fn cliques_and_bounds_from_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), "# two triangles on an edge\n1 2\n1 3\n2 3\n2 4\n3 4\n").unwrap();
    let out = pfroots(dir.path(), &["cliques", "g.txt"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("signature    3x3"));
    let out = pfroots(dir.path(), &["bounds", "g.txt"]);
    let text = stdout(&out);
    assert!(text.contains("EdgeSharedTree"));
    assert!(text.contains("bound        18 (conjectured max)"));
}

#[test]
fn experiment_resume_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--journal", "j.jsonl", "experiment", "--buses", "3", "--count", "3"];
    assert_eq!(pfroots(dir.path(), &args).status.code(), Some(0));
    let first = fs::read(dir.path().join("j.jsonl")).unwrap();
    assert_eq!(pfroots(dir.path(), &args).status.code(), Some(0));
    assert_eq!(fs::read(dir.path().join("j.jsonl")).unwrap(), first);

    let out = pfroots(dir.path(), &["--journal", "j.jsonl", "report", "--csv", "fig.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("fig.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("3,3,"), "{row}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pfroots(dir.path(), &["no-such-command"]).status.code(), Some(1));
    assert_eq!(pfroots(dir.path(), &["experiment", "--buses", "6"]).status.code(), Some(1));
    assert_eq!(pfroots(dir.path(), &["solve", "missing.json"]).status.code(), Some(2));
    fs::write(dir.path().join("bad.json"), r#"{"version": 1, "name": "x", "buses": [], "branches": []}"#).unwrap();
    assert_eq!(pfroots(dir.path(), &["solve", "bad.json"]).status.code(), Some(2));
    assert_eq!(pfroots(dir.path(), &["--help"]).status.code(), Some(0));
}
