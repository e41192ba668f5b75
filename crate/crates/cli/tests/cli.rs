use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpi"))
        .args(args)
        .output()
        .expect("spawn gpi")
}

fn json_stdout(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "status {:?}, stderr {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn oracle_on_examples() {
    let one = json_stdout(&gpi(&["oracle", "--example", "1"]));
    assert!((one["gac"].as_f64().unwrap() - 1.192).abs() < 2e-3);
    assert_eq!(one["kind"], "ComplexPair");
    assert_eq!(one["laplacian_spectrum"].as_array().unwrap().len(), 6);
    let upper = one["delta_interval"][1].as_f64().unwrap();
    assert!((upper - 1.0 / 3.15).abs() < 1e-12);

    let two = json_stdout(&gpi(&["oracle", "--example", "2"]));
    assert!((two["gac"].as_f64().unwrap() - 1.255).abs() < 2e-3);
    assert_eq!(two["kind"], "Real");
}

#[test]
fn oracle_on_two_cycle_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p2.csv");
    std::fs::write(&path, "# two-cycle\n0,1,1\n1,0,1\n").unwrap();
    let r = json_stdout(&gpi(&["oracle", "--graph", path.to_str().unwrap()]));
    assert!((r["gac"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(r["kind"], "Real");
}

#[test]
fn centralized_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let s = json_stdout(&gpi(&[
        "centralized",
        "--example",
        "2",
        "--with-oracle",
        "--out",
        out,
    ]));
    assert_eq!(s["scenario"], "R");
    assert!(s["oracle_error"].as_f64().unwrap() < 5e-3);
    let csv = read(dir.path(), "trace.csv");
    assert!(csv.starts_with("k,d_check,d_hat,d,lam_check,lam_hat,lam_tilde,scenario\n"));
    assert_eq!(
        csv.lines().count(),
        1 + s["iterations"].as_u64().unwrap() as usize
    );
    let trace: Value = serde_json::from_str(&read(dir.path(), "trace.json")).unwrap();
    assert_eq!(
        trace.as_array().unwrap().len(),
        s["iterations"].as_u64().unwrap() as usize
    );
    assert_eq!(
        read(dir.path(), "summary.json"),
        String::from_utf8(gpi(&["centralized", "--example", "2", "--with-oracle"]).stdout).unwrap()
    );
}

#[test]
fn same_flags_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        assert!(gpi(&[
            "centralized",
            "--gen",
            "7,0.4,3",
            "--seed",
            "7",
            "--out",
            out
        ])
        .status
        .success());
        let sub = dir.path().join("dist");
        assert!(gpi(&[
            "distributed",
            "--gen",
            "7,0.4,3",
            "--seed",
            "7",
            "--out",
            sub.to_str().unwrap()
        ])
        .status
        .success());
    }
    for name in [
        "trace.csv",
        "trace.json",
        "summary.json",
        "dist/trace.csv",
        "dist/stats.json",
    ] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}

#[test]
fn distributed_reports_constant_payload() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let s = json_stdout(&gpi(&["distributed", "--example", "1", "--out", out]));
    for est in s["estimates"].as_array().unwrap() {
        assert!((est.as_f64().unwrap() - 1.192).abs() < 1e-2);
    }
    let stats: Value = serde_json::from_str(&read(dir.path(), "stats.json")).unwrap();
    assert_eq!(stats["max_payload_scalars"], 4);
    assert!(
        read(dir.path(), "trace.csv").starts_with("k,node,d_check,d_hat,d,lam_tilde,scenario\n")
    );
}

#[test]
fn linear_schedule_and_caps_are_accepted() {
    let s = json_stdout(&gpi(&[
        "distributed",
        "--example",
        "2",
        "--schedule",
        "linear",
        "--l-max",
        "40",
        "--m-max",
        "40",
        "--parallel",
    ]));
    let lengths = s["loop_lengths"].as_array().unwrap();
    assert_eq!(lengths[0], serde_json::json!([1, 1]));
    assert!(lengths
        .iter()
        .all(|p| p[0].as_u64().unwrap() <= 40 && p[1].as_u64().unwrap() <= 40));
}

#[test]
fn explicit_initial_vector_overrides_seed() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x0.txt");
    std::fs::write(&file, "0.3\n-0.2\n0.5\n0.1\n0.7\n0.4\n0.2\n").unwrap();
    let base = ["centralized", "--gen", "7,0.4,3"];
    let run = |extra: &[&str]| json_stdout(&gpi(&[&base[..], extra].concat()));
    let inline = run(&["--x0", "0.3,-0.2,0.5,0.1,0.7,0.4,0.2", "--seed", "1"]);
    let from_file = run(&["--x0", file.to_str().unwrap(), "--seed", "2"]);
    assert_eq!(inline["estimate"], from_file["estimate"]);
    assert_eq!(inline["iterations"], from_file["iterations"]);
    assert_ne!(inline["estimate"], run(&["--seed", "1"])["estimate"]);
}

#[test]
fn exit_codes() {
    assert_eq!(
        gpi(&["centralized", "--example", "1", "--max-iter", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gpi(&["distributed", "--example", "1", "--max-iter", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gpi(&["centralized", "--example", "1", "--delta", "1.0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        gpi(&["centralized", "--example", "1", "--gen", "5,0.1,1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(gpi(&["centralized"]).status.code(), Some(1));
    assert_eq!(
        gpi(&["oracle", "--graph", "/nonexistent/graph.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        gpi(&["centralized", "--example", "1", "--x0", "1,2"])
            .status
            .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("line.csv");
    std::fs::write(&path, "0,1,1\n1,2,1\n").unwrap();
    let out = gpi(&["centralized", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strongly connected"));
}

#[test]
fn non_convergence_still_writes_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        gpi(&[
            "centralized",
            "--example",
            "1",
            "--max-iter",
            "4",
            "--out",
            out
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(read(dir.path(), "trace.csv").lines().count(), 5);
    let s: Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    assert_eq!(s["converged"], false);
}

#[test]
fn gen_round_trips_through_graph_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    assert!(
        gpi(&["gen", "9,0.3,11", "--output", path.to_str().unwrap()])
            .status
            .success()
    );
    let from_file = json_stdout(&gpi(&["centralized", "--graph", path.to_str().unwrap()]));
    let generated = json_stdout(&gpi(&["centralized", "--gen", "9,0.3,11"]));
    assert_eq!(from_file, generated);

    let json = gpi(&["gen", "4,0,1", "--format", "json"]);
    let doc: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(doc["n"], 4);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn montecarlo_small_table_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "montecarlo",
        "--sizes",
        "6,8",
        "--trials",
        "1",
        "--seed",
        "5",
        "--out",
        out,
    ];
    let first = gpi(&args);
    assert!(first.status.success());
    let again = gpi(&args);
    assert_eq!(first.stdout, again.stdout);
    let table = read(dir.path(), "montecarlo.csv");
    assert_eq!(table.lines().count(), 3);
    assert!(table.lines().skip(1).all(|l| l.ends_with(",4")));
    assert_eq!(read(dir.path(), "trials.csv").lines().count(), 3);
    assert_eq!(gpi(&["montecarlo", "--sizes", "1"]).status.code(), Some(1));
}
