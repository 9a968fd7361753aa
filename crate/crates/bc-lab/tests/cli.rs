//! End-to-end binary checks: exit codes, artifact layout, determinism, and
//! config handling.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bc-lab"))
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    let mut cmd = bin();
    cmd.args(args).arg("--out").arg(out_dir);
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn counterexample_preset_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&["--preset", "paper_s3", "counterexample", "--m-max", "20"], dir.path());
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(dir.path().join("counterexample.json").exists());
    assert!(dir.path().join("counterexample_summary.json").exists());
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(
        &["--preset", "paper_s3", "check", "--condition", "pairwise"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("pairwise: Fails"), "stdout: {stdout}");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"model":{"family":"independent"},"extra":1}"#);
    let output = run(
        &["--config", config.to_str().unwrap(), "moments"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("extra"), "stderr: {stderr}");

    let missing = run(&["--preset", "no_such_preset", "moments"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn simulate_without_seed_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&["--preset", "independent_half", "simulate"], dir.path());
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn fixed_seed_runs_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args = [
        "--preset",
        "markov_symmetric",
        "--seed",
        "99",
        "simulate",
        "--paths",
        "500",
        "--horizon",
        "128",
    ];
    assert_eq!(run(&args, dir_a.path()).status.code(), Some(0));
    assert_eq!(run(&args, dir_b.path()).status.code(), Some(0));
    for name in [
        "simulate_moments.json",
        "simulate_growth.json",
        "simulate_ratios.json",
    ] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "artifact {name} differs between identical runs");
    }
}

#[test]
fn blocks_command_writes_plan_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(
        &[
            "--preset",
            "independent_power",
            "--format",
            "csv",
            "blocks",
            "--theorem",
            "a",
            "--k",
            "6",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let plan = std::fs::read_to_string(dir.path().join("blocks_plan.json")).unwrap();
    assert!(plan.contains("theorem_a"));
    let csv = std::fs::read_to_string(dir.path().join("blocks_probabilities.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "k,probability,partial_sum");
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn config_file_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
            "model": {"family": "independent", "marginal": {"kind": "constant", "p": 0.5}},
            "construction": {"theorem": "b", "k": 5},
            "diagnostics": {"select": ["kochen_stone"], "grid": [2, 3, 5]},
            "moments": {"m_max": 5}
        }"#,
    );
    let output = run(
        &["--config", config.to_str().unwrap(), "analyze"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    for name in [
        "blocks_plan.json",
        "blocks_probabilities.json",
        "moments.json",
        "check_kochen_stone.json",
        "analyze_summary.json",
    ] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let summary = std::fs::read_to_string(dir.path().join("analyze_summary.json")).unwrap();
    assert!(summary.contains("kochen_stone"));
}

#[test]
fn env_thread_override_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = bin();
    cmd.env("BC_LAB_THREADS", "1")
        .args(["--preset", "paper_s3", "moments", "--m-max", "10"])
        .arg("--out")
        .arg(dir.path());
    let output = cmd.output().unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(dir.path().join("moments.json").exists());
}
