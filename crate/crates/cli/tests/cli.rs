//! End-to-end tests of the `icpsk` binary: golden outputs, exit-code
//! classes, and byte-level reproducibility of written files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn problems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn icpsk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icpsk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn enumerate_golden_line() {
    let problem = problems().join("example1.json");
    let out = icpsk(&[
        "enumerate-codes",
        "--problem",
        problem.to_str().unwrap(),
        "--n-code-len",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("candidates=1024 rankN=32 spaces=6 codes=168"),
        "{text}"
    );
    assert!(text.contains("codes_per_space=28"));
}

#[test]
fn enumerate_list_symbolic() {
    let problem = problems().join("example1.json");
    let out = icpsk(&[
        "enumerate-codes",
        "--problem",
        problem.to_str().unwrap(),
        "--n-code-len",
        "3",
        "--list",
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("y1=")).count(), 168);
    assert!(text.contains("y1=x1, y2=x2+x3, y3=x4+x5"), "{text}");
}

#[test]
fn enumerate_single_message_identity() {
    // One message, no side information: the only code is {x1}.
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    std::fs::write(
        &problem,
        r#"{"n": 1, "receivers": [{"wants": [1], "knows": []}]}"#,
    )
    .unwrap();
    let out = icpsk(&[
        "enumerate-codes",
        "--problem",
        problem.to_str().unwrap(),
        "--n-code-len",
        "1",
        "--list",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("codes=1"), "{text}");
    assert!(text.contains("y1=x1"), "{text}");
}

#[test]
fn malformed_problem_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("broken.json");
    std::fs::write(&problem, "{ not json").unwrap();
    let out = icpsk(&[
        "enumerate-codes",
        "--problem",
        problem.to_str().unwrap(),
        "--n-code-len",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("parse error"));
}

#[test]
fn invalid_problem_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("bad.json");
    std::fs::write(
        &problem,
        r#"{"n": 3, "receivers": [{"wants": [1], "knows": [1]}]}"#,
    )
    .unwrap();
    let out = icpsk(&[
        "enumerate-codes",
        "--problem",
        problem.to_str().unwrap(),
        "--n-code-len",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("side information"));
}

#[test]
fn undecodable_code_exits_4_and_names_code() {
    let dir = tempfile::tempdir().unwrap();
    let codes = dir.path().join("codes.txt");
    std::fs::write(&codes, "x1, x2, x3\n").unwrap();
    let problem = problems().join("example1.json");
    let out = icpsk(&[
        "optimize",
        "--problem",
        problem.to_str().unwrap(),
        "--codes",
        codes.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("{x1, x2, x3}"), "{}", stderr(&out));
}

#[test]
fn scale_guard_exits_5() {
    // Every receiver knows all other 13 messages: 2^182 fitting
    // candidates trip the guard.
    let dir = tempfile::tempdir().unwrap();
    let n = 14;
    let receivers: Vec<String> = (1..=n)
        .map(|i| {
            let knows: Vec<String> = (1..=n)
                .filter(|&j| j != i)
                .map(|j| j.to_string())
                .collect();
            format!("{{\"wants\": [{i}], \"knows\": [{}]}}", knows.join(","))
        })
        .collect();
    let problem = dir.path().join("big.json");
    std::fs::write(
        &problem,
        format!("{{\"n\": {n}, \"receivers\": [{}]}}", receivers.join(",")),
    )
    .unwrap();
    let out = icpsk(&[
        "enumerate-codes",
        "--problem",
        problem.to_str().unwrap(),
        "--n-code-len",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
}

#[test]
fn effective_sets_table_rows() {
    let problem = problems().join("example2.json");
    let out = icpsk(&[
        "effective-sets",
        "--problem",
        problem.to_str().unwrap(),
        "--code",
        "x1+x4, x2+x3, x5, x6",
        "--receiver",
        "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("(00000) | {(0000),(1000)} | {(0000)} | {(1000)}"), "{text}");
    assert!(text.contains("(01011) | {(0111),(1111)} | {(0111)} | {(1111)}"), "{text}");
    assert!(text.contains("# 8 distinct sets of size 2"));
}

#[test]
fn optimize_single_code_cascade_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump.json");
    let problem = problems().join("example2.json");
    let codes = problems().join("example2_code.txt");
    let out = icpsk(&[
        "optimize",
        "--problem",
        problem.to_str().unwrap(),
        "--codes",
        codes.to_str().unwrap(),
        "--out",
        dump.to_str().unwrap(),
        "--list",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("R1 | 2 | seed | 645120 | 2.00000"), "{text}");
    assert!(text.contains("R2 | 4 | filter | 128 | 1.84776"), "{text}");
    assert!(text.contains("R3 | 8 | filter | 24 | 0.76537"), "{text}");
    assert!(text.contains("R4 | 8 | filter | 16 | 0.76537"), "{text}");
    assert!(text.contains("# 16 optimal pairs"));

    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(parsed["pairs"].as_array().unwrap().len(), 16);
    assert_eq!(parsed["trace"][1]["survivors"], 128);
    assert_eq!(parsed["manifest"]["priority"], serde_json::json!([1, 2, 3, 4, 5, 6]));
}

#[test]
fn optimize_priority_override() {
    let problem = problems().join("example3.json");
    let codes = problems().join("example3_code.txt");
    let base = icpsk(&[
        "optimize",
        "--problem",
        problem.to_str().unwrap(),
        "--codes",
        codes.to_str().unwrap(),
    ]);
    assert!(base.status.success(), "{}", stderr(&base));
    // Prioritizing R_3 right after R_1 raises its kept distance.
    let reordered = icpsk(&[
        "optimize",
        "--problem",
        problem.to_str().unwrap(),
        "--codes",
        codes.to_str().unwrap(),
        "--priority",
        "1,3,2,4,5",
    ]);
    assert!(reordered.status.success(), "{}", stderr(&reordered));
    let t0 = stdout(&base);
    let t1 = stdout(&reordered);
    assert!(t0.contains("R3 | 8 | filter | 768 | 0.39018"), "{t0}");
    assert!(t1.contains("R3 | 8 | filter | 4096 | 1.11114"), "{t1}");
}

#[test]
fn icg_profile_table() {
    let problem = problems().join("example1.json");
    let pair = problems().join("example1_pair.txt");
    let out = icpsk(&[
        "icg",
        "--problem",
        problem.to_str().unwrap(),
        "--pair",
        pair.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("R1 | 4 | 1.84776 | 19.49"), "{text}");
    assert!(text.contains("R2 | 4 | 1.41421 | 17.16"), "{text}");
    assert!(text.contains("R4 | 8 | 0.76537 | 11.83"), "{text}");
}

#[test]
fn simulate_reproducible_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let problem = problems().join("example1.json");
    let pair = problems().join("example1_pair.txt");
    let run = |path: &Path, decoder: &str| {
        let out = icpsk(&[
            "simulate",
            "--problem",
            problem.to_str().unwrap(),
            "--pair",
            pair.to_str().unwrap(),
            "--snr",
            "0:4:8",
            "--trials",
            "20000",
            "--seed",
            "42",
            "--decoder",
            decoder,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run(&a, "ml");
    run(&b, "ml");
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());
    let head = String::from_utf8_lossy(&bytes_a);
    assert!(head.starts_with("snr_db,receiver,trials,errors,rate,ci_lo,ci_hi\n"));
    // 3 SNR points x 5 receivers.
    assert_eq!(head.lines().count(), 16);

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["decoder"], "ml");
    assert_eq!(manifest["snr_db"], serde_json::json!([0.0, 4.0, 8.0]));

    // The baseline decoder also runs and differs in rule only.
    let c = dir.path().join("c.csv");
    run(&c, "mindist");
    let md: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("c.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(md["decoder"], "mindist");
}

#[test]
fn simulate_rejects_bad_decoder() {
    let problem = problems().join("example1.json");
    let pair = problems().join("example1_pair.txt");
    let out = icpsk(&[
        "simulate",
        "--problem",
        problem.to_str().unwrap(),
        "--pair",
        pair.to_str().unwrap(),
        "--snr",
        "4",
        "--decoder",
        "magic",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}
