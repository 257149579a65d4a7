use std::path::Path;
use std::process::{Command, Output};

fn dimjump(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimjump"))
        .args(args)
        .env("DIMJUMP_OUT_DIR", out_dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn code_build_reports_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let o = dimjump(&["code", "build", "--builtin", "tetra15", "--kind", "3d"], dir.path());
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("n=15") && s.contains("k=1") && s.contains("d=3"), "{s}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dimjump(&["colex", "validate", "--builtin", "tri7"], dir.path()).status.code(), Some(0));
    assert_eq!(dimjump(&["colex", "validate", "--builtin", "nope"], dir.path()).status.code(), Some(1));
    assert_eq!(dimjump(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(
        dimjump(&["colex", "hash", "--builtin", "tri7", "--colex", "x.json"], dir.path()).status.code(),
        Some(2)
    );
    let bad = dimjump(&["simulate", "collapse", "--builtin", "tetra15", "--p", "1.5"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn simulate_writes_outputs_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let o = dimjump(
        &["simulate", "collapse", "--builtin", "tetra15", "--p", "0.01", "--trials", "50", "--seed", "4", "--trace"],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("seed: 4"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("collapse.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 4);
    assert_eq!(json["stats"]["trials"], 50);
    assert_eq!(json["colex_hash"].as_str().unwrap().len(), 64);
    let trace = std::fs::read_to_string(dir.path().join("collapse.trace.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), 51);
    let csv = std::fs::read_to_string(dir.path().join("collapse.csv")).unwrap();
    assert!(csv.starts_with("version,command,colex,colex_hash"));
}

#[test]
fn schedule_round_trip_and_tamper_detection() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq.txt");
    std::fs::write(&seq, "0 1 2 0 3 1\n2 0\n").unwrap();
    let sch = dir.path().join("sch.jsonl");
    let make = dimjump(
        &["schedule", "make", "--stack", "4", "--sequence", seq.to_str().unwrap(), "--out", sch.to_str().unwrap()],
        dir.path(),
    );
    assert!(make.status.success());
    let verify = |p: &Path| dimjump(&["schedule", "verify", "--schedule", p.to_str().unwrap(), "--sequence", seq.to_str().unwrap()], dir.path());
    assert!(verify(&sch).status.success());

    let text = std::fs::read_to_string(&sch).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut rec: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
    rec["swaps"] = serde_json::json!([]);
    lines[1] = rec.to_string();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, lines.join("\n")).unwrap();
    assert_eq!(verify(&bad).status.code(), Some(1));
}
