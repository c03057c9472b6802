use std::fs;
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output};
use std::thread;
use std::time::Duration;

use serde_json::Value;

fn qxor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qxor")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn analyze_reports_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let parity = write(dir.path(), "parity.txt", "n=3\nkind=family\nfamily=parity params=1,2,3\n");
    let v = json(&qxor(&["analyze", &parity]));
    assert_eq!(v["degree"], 1);
    assert_eq!(v["sparsity"], 1);
    assert_eq!(v["bound_qubits"], 2);

    let v = json(&qxor(&["analyze", "and_2"]));
    assert_eq!(v["degree"], 2);
    assert_eq!(v["sparsity"], 4);
    assert_eq!(v["bound_qubits"], 16);

    let constant = write(dir.path(), "one.txt", "n=2\nkind=anf\n0\n");
    let v = json(&qxor(&["analyze", &constant]));
    assert_eq!(v["degree"], 0);
    assert_eq!(v["bound_qubits"], 0);

    let v = json(&qxor(&["analyze", "and_2", "--eps", "0.1"]));
    assert!((v["l1_eps"].as_f64().unwrap() - 1.8).abs() < 1e-7);
}

#[test]
fn exact_parity_run() {
    let v = json(&qxor(&["run", "parity({1,2,3})", "--x", "101", "--y", "011", "--seed", "4"]));
    assert_eq!(v["correct"], true);
    assert_eq!(v["total_qubits"], 2);
    assert_eq!(v["truth"], 1);
    assert_eq!(v["rounds"].as_array().unwrap().len(), 1);
}

#[test]
fn approx_run_reports_pipeline() {
    let v = json(&qxor(&["run", "and_2", "--x", "11", "--y", "00", "--mode", "approx", "--eps", "0.01", "--seed", "3"]));
    let p = &v["pipeline"];
    for key in ["l1", "samples", "sparsity", "reps"] {
        assert!(!p[key].is_null(), "missing {key}");
    }
    assert_eq!(v["repetitions"]["reps"], p["reps"]);
    assert_eq!(v["correct"], true);
}

#[test]
fn usage_and_precondition_errors() {
    let out = qxor(&["run", "and_2", "--x", "101", "--y", "00"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bits"));

    let out = qxor(&["run", "and_2", "--x", "11", "--y", "00", "--mode", "approx", "--eps", "0.2"]);
    assert_eq!(out.status.code(), Some(3));

    let out = qxor(&["run", "and_2", "--x", "11", "--y", "00", "--reps", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_exact_column_is_zero() {
    let out = qxor(&["oracle", "and_2"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    let err = headers.iter().position(|h| h == "error").unwrap();
    let pass = headers.iter().position(|h| h == "pass").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert_eq!(r[err].parse::<f64>().unwrap(), 0.0);
        assert_eq!(&r[pass], "true");
    }
}

#[test]
fn oracle_drift_and_limits() {
    let out = qxor(&["oracle", "and_2", "--derivative-drift", "--eps-profile", "0.05,0.1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 4);
    assert!(!text.contains(",false"));

    let out = qxor(&["oracle", "hamming_le(6,1)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--monte-carlo"));

    let out = qxor(&["oracle", "hamming_le(6,1)", "--monte-carlo", "20"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 65);
}

#[test]
fn sweep_full_three_variable_corpus() {
    let dir = tempfile::tempdir().unwrap();
    for index in 0..256usize {
        let mut text = String::from("n=3\nkind=table\n");
        for z in 0..8usize {
            let v = if index >> z & 1 == 1 { "-1" } else { "+1" };
            text.push_str(&format!("{:03b} {v}\n", z));
        }
        write(dir.path(), &format!("f{index:03}.txt"), &text);
    }
    write(dir.path(), "zz_broken.txt", "n=3\nkind=table\n000 +1\n");
    let out_path = dir.path().join("summary.csv");
    let out = qxor(&["sweep", dir.path().to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(&out_path).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 257);
    let ok = rows.iter().filter(|r| &r[8] == "ok").count();
    assert_eq!(ok, 256);
    let last = rows.last().unwrap();
    assert_eq!(&last[0], "zz_broken.txt");
    assert_eq!(&last[8], "error");
}

#[test]
fn sweep_empty_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = qxor(&["sweep", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

fn spawn_listener(args: Vec<String>) -> thread::JoinHandle<Output> {
    thread::spawn(move || Command::new(env!("CARGO_BIN_EXE_qxor")).args(&args).output().unwrap())
}

fn connect_with_retry(args: &[&str]) -> Output {
    for _ in 0..50 {
        let out = qxor(args);
        if out.status.code() != Some(1) || !String::from_utf8_lossy(&out.stderr).contains("connecting") {
            return out;
        }
        thread::sleep(Duration::from_millis(100));
    }
    panic!("could not connect");
}

#[test]
fn loopback_serve_matches_run() {
    let port = free_port().to_string();
    let bob = spawn_listener(
        ["serve", "--role", "bob", "--function", "and_2", "--listen", "--port", &port, "--y", "10", "--seed", "7"]
            .map(String::from)
            .to_vec(),
    );
    let alice = connect_with_retry(&[
        "serve", "--role", "alice", "--function", "and_2", "--port", &port, "--x", "01", "--seed", "7",
    ]);
    let a = json(&alice);
    let b = json(&bob.join().unwrap());
    let local = json(&qxor(&["run", "and_2", "--x", "01", "--y", "10", "--seed", "7"]));
    assert_eq!(a["rounds"], local["rounds"]);
    assert_eq!(a["answer"], local["answer"]);
    assert_eq!(a["total_qubits"], local["total_qubits"]);
    assert!(a["truth"].is_null());
    let ledger = &b["ledger"];
    let total = ledger["alice_to_bob"].as_u64().unwrap() + ledger["bob_to_alice"].as_u64().unwrap();
    assert_eq!(total, a["total_qubits"].as_u64().unwrap());
}

#[test]
fn serve_role_mismatch_fails_handshake() {
    let port = free_port().to_string();
    let first = spawn_listener(
        ["serve", "--role", "alice", "--function", "and_2", "--listen", "--port", &port, "--x", "10"]
            .map(String::from)
            .to_vec(),
    );
    let second = connect_with_retry(&["serve", "--role", "alice", "--function", "and_2", "--port", &port, "--x", "01"]);
    assert_eq!(second.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&second.stderr).contains("handshake"));
    assert_eq!(first.join().unwrap().status.code(), Some(5));
}
