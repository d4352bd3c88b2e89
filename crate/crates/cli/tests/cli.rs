use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn symtest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symtest"))
        .args(args)
        .output()
        .unwrap()
}

fn symtest_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symtest"))
        .args(args)
        .env("SYMTEST_THREADS", threads)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// Parses CSV rows into (header, rows of cells).
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

const IDENTITY_2: &str = r#"{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[1,0]]}"#;
const PAULI_X: &str = r#"{"rows":2,"cols":2,"data":[[0,0],[1,0],[1,0],[0,0]]}"#;

#[test]
fn amp_damp_exact_matches_closed_form() {
    let out = stdout(&symtest(&["amp-damp", "--rep", "I,X", "--mode", "exact"]));
    let (header, rows) = csv(&out);
    assert_eq!(
        header,
        ["gamma_t", "estimate", "exact", "shots", "seed", "mode"]
    );
    assert_eq!(rows.len(), 9);
    for row in rows {
        let gt: f64 = row[0].parse().unwrap();
        let exact: f64 = row[column(&header, "exact")].parse().unwrap();
        let curve = 0.5 * (1.0 - (-gt).exp()).powi(2);
        assert!((exact - curve).abs() <= 1e-12, "Γt={gt}");
        assert_eq!(row[column(&header, "mode")], "exact");
        assert_eq!(row[column(&header, "shots")], "0");
    }
}

#[test]
fn spin_chain_sampled_symmetric_rows_near_zero() {
    let out = stdout(&symtest(&[
        "spin-chain",
        "--rep",
        "I,Z1Z2",
        "--mode",
        "sampled",
    ]));
    let (header, rows) = csv(&out);
    assert_eq!(rows.len(), 12);
    for row in rows {
        let est: f64 = row[column(&header, "estimate")].parse().unwrap();
        let exact: f64 = row[column(&header, "exact")].parse().unwrap();
        assert!(est.abs() <= 0.02, "{row:?}");
        assert!(exact.abs() <= 1e-10);
    }
}

#[test]
fn sampled_rows_within_twice_epsilon() {
    let out = stdout(&symtest(&[
        "amp-damp",
        "--rep",
        "I,X",
        "--mode",
        "sampled",
        "--epsilon",
        "0.05",
        "--delta",
        "0.05",
    ]));
    let (header, rows) = csv(&out);
    for row in &rows {
        let est: f64 = row[column(&header, "estimate")].parse().unwrap();
        let exact: f64 = row[column(&header, "exact")].parse().unwrap();
        assert!((est - exact).abs() <= 0.1, "{row:?}");
    }
}

#[test]
fn identity_channel_from_files_is_symmetric() {
    let dir = TempDir::new().unwrap();
    let ch = write(
        &dir,
        "id.json",
        &format!(r#"{{"in_dim":2,"out_dim":2,"kraus":[{IDENTITY_2}]}}"#),
    );
    let rep = write(
        &dir,
        "rep.json",
        &format!(r#"{{"elements":[{IDENTITY_2},{PAULI_X}]}}"#),
    );
    let out = stdout(&symtest(&["channel", "--channel", &ch, "--rep", &rep]));
    let (header, rows) = csv(&out);
    let v: f64 = rows[0][column(&header, "estimate")].parse().unwrap();
    assert!(v.abs() <= 1e-12);
}

#[test]
fn state_and_measurement_scenarios() {
    let dir = TempDir::new().unwrap();
    let plus = write(
        &dir,
        "plus.json",
        r#"{"rows":2,"cols":2,"data":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}"#,
    );
    let (h, rows) = csv(&stdout(&symtest(&[
        "state", "--state", &plus, "--rep", "I,Z",
    ])));
    let v: f64 = rows[0][column(&h, "exact")].parse().unwrap();
    assert!((v - 1.0).abs() <= 1e-12);

    let povm = write(
        &dir,
        "z.json",
        r#"{"in_dim":2,"effects":[{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[0,0]]},{"rows":2,"cols":2,"data":[[0,0],[0,0],[0,0],[1,0]]}]}"#,
    );
    let (h, rows) = csv(&stdout(&symtest(&[
        "measurement",
        "--povm",
        &povm,
        "--rep",
        "I,X",
        "--out-perm",
        "bit-flip",
    ])));
    assert!(rows[0][column(&h, "exact")].parse::<f64>().unwrap().abs() <= 1e-10);
    let (h, rows) = csv(&stdout(&symtest(&[
        "measurement",
        "--povm",
        &povm,
        "--rep",
        "I,X",
    ])));
    assert!(rows[0][column(&h, "exact")].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn reruns_with_same_seed_are_identical() {
    let args = [
        "amp-damp",
        "--rep",
        "I,X",
        "--mode",
        "sampled",
        "--shots",
        "5000",
        "--seed",
        "42",
        "--gamma-t",
        "0.5,1",
    ];
    let a = stdout(&symtest(&args));
    let b = stdout(&symtest(&args));
    assert_eq!(a, b);
    let one = stdout(&symtest_env(&args, "1"));
    let many = stdout(&symtest_env(&args, "3"));
    assert_eq!(a, one);
    assert_eq!(one, many);
    let other_seed = stdout(&symtest(&[
        "amp-damp",
        "--rep",
        "I,X",
        "--mode",
        "sampled",
        "--shots",
        "5000",
        "--seed",
        "43",
        "--gamma-t",
        "0.5,1",
    ]));
    assert_ne!(a, other_seed);
}

#[test]
fn json_output_to_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("out.json");
    let o = symtest(&[
        "amp-damp",
        "--rep",
        "I,Z",
        "--gamma-t",
        "0,1",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[1]["params"]["gamma_t"], serde_json::json!(1.0));
    assert_eq!(v[1]["mode"], "exact");
    assert!(v[1]["exact"].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let code = |o: Output| o.status.code().unwrap();

    let garbage = write(&dir, "bad.json", "{ not json");
    assert_eq!(
        code(symtest(&["channel", "--channel", &garbage, "--rep", "I,X"])),
        1
    );
    assert_eq!(code(symtest(&["amp-damp", "--rep", "I,Q"])), 1);
    assert_eq!(code(symtest(&["amp-damp"])), 1);
    assert_eq!(
        code(symtest(&["amp-damp", "--rep", "I,X", "--gamma-t", "0:1:0"])),
        1
    );
    assert_eq!(code(symtest_env(&["amp-damp", "--rep", "I,X"], "zero")), 1);

    let not_unitary = write(
        &dir,
        "rep.json",
        &format!(
            r#"{{"elements":[{IDENTITY_2},{{"rows":2,"cols":2,"data":[[2,0],[0,0],[0,0],[1,0]]}}]}}"#
        ),
    );
    assert_eq!(code(symtest(&["amp-damp", "--rep", &not_unitary])), 2);
    let incomplete = write(
        &dir,
        "ch.json",
        r#"{"in_dim":2,"out_dim":2,"kraus":[{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[0,0]]}]}"#,
    );
    assert_eq!(
        code(symtest(&[
            "channel",
            "--channel",
            &incomplete,
            "--rep",
            "I,X"
        ])),
        2
    );
    assert_eq!(
        code(symtest(&["amp-damp", "--rep", "I,X", "--epsilon", "0"])),
        2
    );

    let negative = write(
        &dir,
        "neg.json",
        r#"{"rows":2,"cols":2,"data":[[1.5,0],[0,0],[0,0],[-0.5,0]]}"#,
    );
    assert_eq!(
        code(symtest(&["state", "--state", &negative, "--rep", "I,Z"])),
        3
    );
}
