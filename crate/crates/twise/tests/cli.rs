//! End-to-end smoke tests for the command-line interface: every
//! subcommand family runs against real files and the exit-code contract
//! is checked.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twise"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twise-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn treepack_and_partconn() {
    let dir = workdir("pack");
    let graph = dir.join("g.json");
    fs::write(
        &graph,
        r#"{"t":4,"edges":[[1,2],[1,2],[1,3],[1,3],[1,4],[1,4]]}"#,
    )
    .unwrap();

    let out = bin()
        .args(["treepack", "--graph"])
        .arg(&graph)
        .args(["-k", "2"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["packing"].as_array().unwrap().len(), 2);

    let out = bin()
        .args(["partconn", "--graph"])
        .arg(&graph)
        .args(["-k", "2"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["partition_connected"], true);

    // Malformed input exits with code 4.
    let bad = dir.join("bad.json");
    fs::write(&bad, "{nope").unwrap();
    let out = bin()
        .args(["partconn", "--graph"])
        .arg(&bad)
        .args(["-k", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn hyper_commands() {
    let dir = workdir("hyper");
    let h = dir.join("h.json");
    fs::write(&h, r#"{"t":4,"edges":[[1,2,3],[1,3,4],[1,2,4]]}"#).unwrap();

    let out = bin()
        .args(["hyper", "conn", "--hypergraph"])
        .arg(&h)
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["weak_partition_connectivity"], 2);
    assert_eq!(v["components"], 1);

    let out = bin()
        .args(["hyper", "assign", "--hypergraph"])
        .arg(&h)
        .args(["--limit", "2"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["count"], 27); // 3 spanning trees per triangle edge

    let out = bin()
        .args(["hyper", "disting", "--hypergraph"])
        .arg(&h)
        .args(["-k", "2"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["distinguishable"], true);
}

#[test]
fn intmat_commands() {
    let dir = workdir("intmat");
    let sys = dir.join("s.json");
    fs::write(
        &sys,
        r#"{"n":6,"t":4,"l":1,"layers":[[[1,2,4]],[[1,3,5]],[[2,3,6]],[[4,5,6]]]}"#,
    )
    .unwrap();

    let out = bin()
        .args(["intmat", "build", "--system"])
        .arg(&sys)
        .args(["-k", "2"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["rows"], 12);
    assert_eq!(v["cols"], 12);
    assert_eq!(v["variables"].as_array().unwrap().len(), 12); // 6 vars x 2 powers

    let out = bin()
        .args(["intmat", "check", "--system"])
        .arg(&sys)
        .args(["-k", "2", "--trials", "3", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = bin()
        .args(["intmat", "certify", "--system"])
        .arg(&sys)
        .args(["-k", "2"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["packing"]["trees"].as_array().unwrap().len(), 2);
}

#[test]
fn sieve_run_and_replay() {
    let dir = workdir("sieve");
    let sys = dir.join("s.json");
    // Twelve full sets over 40 ground elements.
    let sets: Vec<String> = (0..12)
        .map(|_| {
            let inner: Vec<String> = (1..=40).map(|j| j.to_string()).collect();
            format!("[[{}]]", inner.join(","))
        })
        .collect();
    fs::write(
        &sys,
        format!(r#"{{"n":40,"t":12,"l":1,"layers":[{}]}}"#, sets.join(",")),
    )
    .unwrap();
    let trace_path = dir.join("trace.json");
    let out = bin()
        .args(["sieve", "run", "--system"])
        .arg(&sys)
        .args([
            "--epsilon",
            "1.0",
            "--delta",
            "3.0",
            "--ell",
            "1",
            "-k",
            "2",
            "--seed",
            "7",
            "--json-out",
        ])
        .arg(&trace_path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = bin()
        .args(["sieve", "replay", "--trace"])
        .arg(&trace_path)
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["replayed"], true);
}

#[test]
fn rs_commands() {
    let out = bin()
        .args([
            "rs", "encode", "--prime", "11", "--alpha", "0,1,2,3,4,5", "--message", "3,9",
        ])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["codeword"].as_array().unwrap().len(), 6);
    assert_eq!(v["codeword"][0], 3); // f(0) = 3

    let out = bin()
        .args([
            "rs", "listdec", "--prime", "11", "--alpha", "0,1,2,3,4,5", "--y", "3,1,10,8,6,4",
            "--radius", "0.0", "-k", "2",
        ])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["count"], 1);
    assert_eq!(v["messages"][0], serde_json::json!([3, 9]));

    let out = bin()
        .args(["rs", "johnson", "-n", "6", "-k", "2", "-q", "11"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert!((v["list_bound"].as_f64().unwrap() - 330.0).abs() < 1e-9);
}

#[test]
fn rs_listrec_command() {
    let dir = workdir("listrec");
    let lists = dir.join("lists.json");
    // Per-coordinate lists of size 2 covering the codeword of (3, 9).
    fs::write(&lists, r#"[[3,0],[1,0],[10,0],[8,0],[6,0],[4,0]]"#).unwrap();
    let out = bin()
        .args([
            "rs", "listrec", "--prime", "11", "--alpha", "0,1,2,3,4,5", "--radius", "0.0", "-k",
            "2", "--lists",
        ])
        .arg(&lists)
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert!(v["count"].as_u64().unwrap() >= 1);
    assert!(v["messages"]
        .as_array()
        .unwrap()
        .contains(&serde_json::json!([3, 9])));
}

#[test]
fn phf_commands() {
    let dir = workdir("phf");
    let matrix_path = dir.join("m.json");
    let out = bin()
        .args([
            "phf", "build", "-n", "4", "-k", "2", "-t", "3", "--prime", "7", "--attempts", "3",
            "--seed", "3", "--json-out",
        ])
        .arg(&matrix_path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stored: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&matrix_path).unwrap()).unwrap();
    assert_eq!(stored["certified"], true);
    assert_eq!(stored["threshold"], 1);

    // Verify a triple of columns against the stored matrix.
    let just_matrix = dir.join("matrix-only.json");
    fs::write(&just_matrix, stored["matrix"].to_string()).unwrap();
    let out = bin()
        .args(["phf", "verify", "--matrix"])
        .arg(&just_matrix)
        .args(["--columns", "0,1,2"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert!(v["separating_rows"].as_u64().unwrap() >= 1);
}

#[test]
fn lab_search_checkpoint_and_replay() {
    let dir = workdir("lab");
    let records = dir.join("results.jsonl");
    let checkpoint = dir.join("cp.json");

    // First run with a small budget, then resume to exhaustion.
    let out = bin()
        .args(["lab", "search-matrix", "-t", "3", "-k", "1", "--n-max", "3", "--budget", "4"])
        .args(["--out"])
        .arg(&records)
        .args(["--checkpoint"])
        .arg(&checkpoint)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "small budget is not exhausted");

    let out = bin()
        .args(["lab", "search-matrix", "-t", "3", "-k", "1", "--n-max", "3"])
        .args(["--out"])
        .arg(&records)
        .args(["--checkpoint"])
        .arg(&checkpoint)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "resumed run exhausts the space");

    // Cursors across both runs are strictly increasing (no repeats).
    let text = fs::read_to_string(&records).unwrap();
    let mut cursors = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if v["experiment"] == "header" {
            continue;
        }
        cursors.push(v["cursor"].as_u64().unwrap());
    }
    let mut sorted = cursors.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(cursors, sorted, "records repeat or out of order");

    // Replay every record.
    let out = bin()
        .args(["lab", "replay", "--records"])
        .arg(&records)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    // Tampering trips the checksum.
    let tampered = dir.join("tampered.jsonl");
    fs::write(&tampered, text.replace("\"nonsingular\"", "\"counterexample-candidate\""))
        .unwrap();
    let out = bin()
        .args(["lab", "replay", "--records"])
        .arg(&tampered)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
