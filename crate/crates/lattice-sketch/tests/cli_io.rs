//! End-to-end tests of the binary: file formats, exit codes, and the
//! merge-vs-concatenation byte identity.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lattice-sketch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn build_merge_estimate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("kernel.json");
    // span{(2,0),(0,3)}: one torsion coordinate mod 6
    write(&kernel, r#"{"n": 2, "basis": [[2, 0], [0, 3]]}"#);

    let s1 = dir.path().join("s1.csv");
    write(&s1, "# first shard\n1,1\n2,1\n1,1\n");
    let s2 = dir.path().join("s2.csv");
    write(&s2, "2,-1\n1,-1\n");
    let whole = dir.path().join("whole.csv");
    write(&whole, "1,1\n2,1\n1,1\n2,-1\n1,-1\n");

    let (a, b, c, d) = (
        dir.path().join("a.json"),
        dir.path().join("b.json"),
        dir.path().join("merged.json"),
        dir.path().join("direct.json"),
    );
    for (stream, out) in [(&s1, &a), (&s2, &b), (&whole, &d)] {
        let r = run(&[
            "sketch",
            "build",
            "--kernel",
            kernel.to_str().unwrap(),
            "--stream",
            stream.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let r = run(&[
        "sketch",
        "merge",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--kernel",
        kernel.to_str().unwrap(),
        "--out",
        c.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    // merged state file is byte-identical to the direct build
    assert_eq!(
        std::fs::read(&c).unwrap(),
        std::fs::read(&d).unwrap(),
        "merge of shards must equal the build of the concatenated stream"
    );

    let r = run(&[
        "sketch",
        "estimate",
        d.to_str().unwrap(),
        "--kernel",
        kernel.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    // freq (1,0): the min-l1 member of (1,0) + span{(2,0),(0,3)}
    assert_eq!(String::from_utf8_lossy(&r.stdout).trim(), "-1 0");

    let r = run(&[
        "sketch",
        "estimate",
        d.to_str().unwrap(),
        "--kernel",
        kernel.to_str().unwrap(),
        "--coord",
        "2",
        "--format",
        "json",
    ]);
    assert!(r.status.success());
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["coordinate"], 2);
    assert_eq!(v["value"], "0");
}

#[test]
fn empty_stream_estimates_zero() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("kernel.json");
    write(&kernel, r#"{"n": 3, "basis": []}"#);
    let stream = dir.path().join("empty.csv");
    write(&stream, "# nothing\n");
    let state = dir.path().join("state.json");
    let r = run(&[
        "sketch",
        "build",
        "--kernel",
        kernel.to_str().unwrap(),
        "--stream",
        stream.to_str().unwrap(),
        "--out",
        state.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let r = run(&[
        "sketch",
        "estimate",
        state.to_str().unwrap(),
        "--kernel",
        kernel.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    assert_eq!(String::from_utf8_lossy(&r.stdout).trim(), "0 0 0");
}

#[test]
fn saturate_flag_decodes_over_torsion_free_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("kernel.json");
    write(&kernel, r#"{"n": 2, "basis": [[2, 2]]}"#);
    let stream = dir.path().join("s.csv");
    // freq (3,1): min-l1 over span{(2,2)} differs from min-l1 over span{(1,1)}
    write(&stream, "1,1\n1,1\n1,1\n2,1\n");
    let state = dir.path().join("state.json");
    assert!(run(&[
        "sketch",
        "build",
        "--kernel",
        kernel.to_str().unwrap(),
        "--stream",
        stream.to_str().unwrap(),
        "--out",
        state.to_str().unwrap(),
    ])
    .status
    .success());
    let plain = run(&[
        "sketch",
        "estimate",
        state.to_str().unwrap(),
        "--kernel",
        kernel.to_str().unwrap(),
    ]);
    let saturated = run(&[
        "sketch",
        "estimate",
        state.to_str().unwrap(),
        "--kernel",
        kernel.to_str().unwrap(),
        "--saturate",
    ]);
    assert!(plain.status.success() && saturated.status.success());
    assert_eq!(String::from_utf8_lossy(&plain.stdout).trim(), "1 -1");
    assert_eq!(String::from_utf8_lossy(&saturated.stdout).trim(), "0 -2");
}

#[test]
fn distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k1 = dir.path().join("k1.json");
    let k2 = dir.path().join("k2.json");
    write(&k1, r#"{"n": 1, "basis": [[2]]}"#);
    write(&k2, r#"{"n": 1, "basis": [[3]]}"#);
    let stream = dir.path().join("s.csv");
    write(&stream, "1,1\n");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (k, out) in [(&k1, &a), (&k2, &b)] {
        assert!(run(&[
            "sketch",
            "build",
            "--kernel",
            k.to_str().unwrap(),
            "--stream",
            stream.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status
        .success());
    }

    // fingerprint mismatch: merging states of different kernels
    let r = run(&[
        "sketch",
        "merge",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--kernel",
        k1.to_str().unwrap(),
        "--out",
        dir.path().join("c.json").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(3));

    // malformed stream
    let bad = dir.path().join("bad.csv");
    write(&bad, "1,7\n");
    let r = run(&[
        "sketch",
        "build",
        "--kernel",
        k1.to_str().unwrap(),
        "--stream",
        bad.to_str().unwrap(),
        "--out",
        dir.path().join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));

    // malformed kernel json
    let badk = dir.path().join("badk.json");
    write(&badk, "{\"n\": 1}");
    let r = run(&[
        "sketch",
        "build",
        "--kernel",
        badk.to_str().unwrap(),
        "--stream",
        stream.to_str().unwrap(),
        "--out",
        dir.path().join("y.json").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));

    // budget refusal is a distinct code with a machine-readable reason
    let r = bin()
        .args([
            "verify",
            "space-count",
            "--kernel",
            "zero",
            "--n",
            "8",
            "--m",
            "4",
            "--format",
            "json",
        ])
        .env("LATTICE_SKETCH_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_slice(&r.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "budget-exceeded");
}

#[test]
fn verify_subcommand_runs_named_suites() {
    let r = run(&["verify", "l1min", "--trials", "50", "--n", "4"]);
    assert!(r.status.success());
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("l1min: PASS"));

    let r = run(&[
        "verify",
        "space-count",
        "--kernel",
        "repetition",
        "--n",
        "2",
        "--m",
        "1",
    ]);
    assert!(r.status.success());
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("cosets=5 >= 3"), "got: {text}");

    let r = run(&["verify", "no-such-suite"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn verify_quotient_on_automaton_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clamped.json");
    let a = lattice_sketch::automaton::ExplicitAutomaton::clamped_counter(3);
    std::fs::write(&path, lattice_sketch::automaton::automaton_to_json(&a).unwrap()).unwrap();
    let r = run(&[
        "verify",
        "quotient",
        "--automaton",
        path.to_str().unwrap(),
        "--m",
        "4",
        "--len",
        "6",
        "--format",
        "json",
    ]);
    assert!(
        r.status.success(),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn experiment_emits_stable_csv() {
    let args = [
        "experiment",
        "--n",
        "2",
        "--m-list",
        "1,2,4,8",
        "--kernels",
        "zero,repetition,diagonal-mod(2,3)",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "CSV must be byte-stable");
    let text = String::from_utf8_lossy(&first.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kernel,n,rank,eps_hat,eps_hat_f64,eps_window,rank_floor_72eps2,m,status,coset_bits,lower_bound_bits"
    );
    // zero kernel rows: eps 0, bits = n log2(2m+1) exactly
    let zero_m1 = lines.next().unwrap();
    assert!(zero_m1.starts_with("zero,2,0,0,0.000000,below,inf,1,ok,"), "{zero_m1}");
    let fields: Vec<&str> = zero_m1.split(',').collect();
    assert_eq!(fields[9], fields[10], "zero kernel meets the floor exactly");
    // repetition at m=1 reports log2(5) measured bits
    let rep_row = text
        .lines()
        .find(|l| l.starts_with("repetition,2,1,1/2,") && l.contains(",1,ok,"))
        .expect("repetition row");
    assert!(rep_row.contains("2.321928"), "{rep_row}");
}
