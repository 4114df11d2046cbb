//! Integration tests for the `ym2d` binary: exit codes, manifest and CSV
//! outputs, config-file merging, and the frozen partition-value contract.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ym2d"))
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("manifest.json")).expect("manifest.json");
    serde_json::from_str(&text).expect("valid manifest JSON")
}

#[test]
fn partition_value_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "partition",
        "--group",
        "u1",
        "--sig",
        "0,0,2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("Z_{p=0,g=0,T=2}()"), "stdout: {text}");
    // Extract the printed value and compare with the independently frozen
    // reference for the closed sphere at total area 2 on U(1).
    let value: f64 = text
        .split(" = ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .expect("value field")
        .parse()
        .expect("parsable value");
    assert!((value - 1.77263720482665).abs() < 1e-9, "Z = {value}");

    let m = manifest(dir.path());
    assert_eq!(m["command"], "partition");
    assert_eq!(m["pass"], true);
    assert!(m["config_hash"].as_str().unwrap().starts_with("fnv1a64:"));
    assert_eq!(m["config"]["area"], 2.0);
    let csv = std::fs::read_to_string(dir.path().join("partition.csv")).unwrap();
    assert!(
        csv.starts_with("p,genus,area,value,tail_bound,cutoff_casimir\n"),
        "csv: {csv}"
    );
}

#[test]
fn glue_check_passes_at_tight_tolerance() {
    let out = run(&["glue-check", "--group", "su2", "--tol", "1e-7"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS"), "stdout: {text}");
    assert!(!text.contains("FAIL"), "stdout: {text}");
}

#[test]
fn heat_semigroup_gate_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "heat",
        "--group",
        "su2",
        "--time",
        "1.0",
        "--angles",
        "0.5,2.0",
        "--check-semigroup",
        "96",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("heat.csv")).unwrap();
    assert!(
        csv.starts_with("angle,value,tail_bound,cutoff_casimir,semigroup_residual\n"),
        "csv: {csv}"
    );
    // Two data rows for the two requested angles.
    assert_eq!(csv.lines().count(), 3, "csv: {csv}");
}

#[test]
fn small_time_heat_values_are_positive() {
    // Below the character-series regime the image sum takes over; the CLI
    // must report strictly positive tail values instead of roundoff noise.
    let out = run(&[
        "heat",
        "--group",
        "su2",
        "--time",
        "0.05",
        "--angles",
        "0.4,2.0,3.1",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    for line in stdout(&out).lines().skip(2) {
        let value: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!(value >= 0.0, "negative density in: {line}");
    }
}

#[test]
fn bad_arguments_exit_2() {
    // Unknown group.
    let out = run(&["heat", "--group", "e8", "--time", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("unknown group"),
        "stderr: {}",
        stderr(&out)
    );

    // Missing required option (no default exists for --sig).
    let out = run(&["partition", "--group", "u1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--sig"), "stderr: {}", stderr(&out));

    // Malformed loop word.
    let out = run(&[
        "wilson",
        "--group",
        "u1",
        "--graph",
        &fixture("torus_two_face.json"),
        "--word",
        "abc",
        "--label",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("bad word letter"),
        "stderr: {}",
        stderr(&out)
    );

    // Unknown flag is a clap parse error.
    let out = run(&["heat", "--group", "u1", "--time", "1", "--nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_graph_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"vertices\": 1").unwrap();
    let out = run(&[
        "sample",
        "--group",
        "u1",
        "--graph",
        path.to_str().unwrap(),
        "--steps",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"group": "su2", "bogus": 1}"#).unwrap();
    let out = run(&["characters", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"), "stderr: {}", stderr(&out));
}

#[test]
fn failed_gate_exits_1_with_manifest() {
    // An absurd expectation forces the Wilson gate to fail; the manifest
    // must still be written, with pass = false.
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "wilson",
        "--group",
        "u1",
        "--graph",
        &fixture("torus_two_face.json"),
        "--word",
        "+0",
        "--label",
        "1",
        "--steps",
        "4000",
        "--seed",
        "3",
        "--expect",
        "5.0",
        "--k-sigma",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("FAIL"));
    let m = manifest(dir.path());
    assert_eq!(m["pass"], false);
    assert_eq!(m["command"], "wilson");
}

#[test]
fn config_file_merges_with_cli_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    // Config file uses kebab-case keys; --mc on the command line must win.
    std::fs::write(
        &cfg,
        r#"{"group": "su2", "max-label": 1, "mc": 9000, "seed": 1}"#,
    )
    .unwrap();
    let out = run(&[
        "characters",
        "--config",
        cfg.to_str().unwrap(),
        "--mc",
        "6000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let m = manifest(dir.path());
    assert_eq!(m["config"]["group"], "su2");
    assert_eq!(m["config"]["max_label"], 1);
    assert_eq!(
        m["config"]["mc"], 6000,
        "command line should override the file"
    );
    assert_eq!(m["config"]["seed"], 1);
    let csv = std::fs::read_to_string(dir.path().join("characters.csv")).unwrap();
    // Header plus one row per label 0..=1.
    assert_eq!(csv.lines().count(), 3, "csv: {csv}");
}

#[test]
fn zero_one_flat_contrast_gate() {
    let out = run(&[
        "zero-one", "--group", "u1", "--ladder", "1,4,16", "--mc", "2000", "--seed", "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("PASS"), "stdout: {}", stdout(&out));
}
