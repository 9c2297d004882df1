use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motiondual"))
        .args(args)
        .env_remove("MOTIONDUAL_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run(&["distance", "--n", "5", "1,2", "0,0"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["report", "--n", "1"]).status.code(), Some(1));
}

#[test]
fn distance_and_walk() {
    let o = run(&["distance", "--n", "8", "0,0,0,0", "1,1,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "4");
    let o = run(&["walk", "--n", "7", "0,0,0", "2,1,1"]);
    let w: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(w["steps"].as_array().unwrap().len() <= 4);
}

#[test]
fn report_json() {
    let o = run(&["report", "--n", "9", "--bound", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k_ma"], "5/2");
    assert_eq!(v["orc_a"], 4);
}

#[test]
fn graph_formats() {
    let dot = stdout(&run(&[
        "graph", "--n", "4", "--bound", "1", "--format", "dot",
    ]));
    assert!(dot.starts_with("graph "));
    let json = stdout(&run(&[
        "graph", "--n", "5", "--bound", "1", "--kind", "sub", "--format", "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(!v["ideals"].as_array().unwrap().is_empty());
}

#[test]
fn chain_file_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    let p = path.to_str().unwrap();
    let o = run(&[
        "chain", "--n", "7", "--bound", "1", "0,0,0", "1,1,1", "-o", p,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(run(&["check-chain", p]).status.code(), Some(0));

    let mut cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let sets = cert["chain"].as_array_mut().unwrap();
    let first = sets[0].clone();
    sets[2] = first;
    std::fs::write(&path, cert.to_string()).unwrap();
    assert_eq!(run(&["check-chain", p]).status.code(), Some(2));
}

#[test]
fn merge_certificate_file_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    let o = run(&[
        "certify", "--n", "9", "2,1,0,0", "1,1,1,-1", "3,0,0,0", "-o", p,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(run(&["check-cert", p]).status.code(), Some(0));

    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let cert = v.get_mut("certificate").unwrap();
    cert["claimed_n"] = serde_json::json!(0);
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(run(&["check-cert", p]).status.code(), Some(2));
}

#[test]
fn unreadable_file_is_a_usage_error() {
    assert_eq!(
        run(&["check-cert", "/nonexistent/cert.json"]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_small_range() {
    let o = run(&["verify", "--n-min", "3", "--n-max", "6", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all checks passed"));
}
