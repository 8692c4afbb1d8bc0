use std::path::Path;
use std::process::{Command, Output};

use evasion::report;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evasion"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["count-gp", "--q", "3", "--n", "2"])), 0);
    assert_eq!(code(&run(&["bogus"])), 1);
    assert_eq!(code(&run(&["alpha", "--q", "7", "--seed", "1"])), 1);
    assert_eq!(
        code(&run(&["alpha", "--q", "6", "--p", "0.5", "--seed", "1"])),
        1
    );
    let capped = [
        "cctree",
        "--process",
        "collinear",
        "--q",
        "9",
        "--seed",
        "1",
        "--max-nodes",
        "30",
        "--traces",
        "2",
    ];
    assert_eq!(code(&run(&capped)), 2);
    assert_eq!(
        code(&run(&["cctree", "--process", "krset", "--q", "11"])),
        1
    );
}

#[test]
fn verify_reports_failure_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let line = dir.path().join("line.txt");
    std::fs::write(&line, "5 2 4\n0,0\n1,1\n2,2\n3,3\n").unwrap();
    let o = run(&[
        "verify",
        "--what",
        "evasive",
        "--input",
        path(&line),
        "--k",
        "1",
        "--r",
        "3",
    ]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["evasive"], false);

    let conic = dir.path().join("conic.txt");
    std::fs::write(&conic, "5 2 4\n0,0\n1,1\n2,4\n3,4\n").unwrap();
    let o = run(&[
        "verify",
        "--what",
        "evasive",
        "--input",
        path(&conic),
        "--k",
        "1",
        "--r",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn flags_override_config_and_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# alpha run\nq = 11\np = 0.3\ntrials = 4\nseed = 9\n").unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let o = run(&[
        "alpha",
        "--config",
        path(&cfg),
        "--q",
        "7",
        "--out",
        path(&a),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    run(&[
        "alpha",
        "--config",
        path(&cfg),
        "--q",
        "7",
        "--out",
        path(&b),
    ]);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["q"], 7);
    assert_eq!(v["p"], 0.3);
    assert_eq!(v["trials"], 4);
    assert_eq!(v["seed"], 9);
}

#[test]
fn csv_output_matches_json() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("r.json");
    let c = dir.path().join("r.csv");
    let args = [
        "alpha", "--q", "7", "--p", "0.6", "--trials", "3", "--seed", "2",
    ];
    run(&[&args[..], &["--out", path(&j)]].concat());
    let o = run(&[&args[..], &["--out", path(&c), "--format", "csv"]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let from_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    let from_csv = report::csv_to_value(&std::fs::read_to_string(&c).unwrap(), "rows").unwrap();
    assert_eq!(from_csv, from_json);
}
