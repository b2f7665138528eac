//! End-to-end checks of the binary: exit codes, output files, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geomrl"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run_ok(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn minimal_config(out: &Path) -> String {
    format!(
        r#"{{
            "env": {{"kind": "quat_wahba", "size": 2, "seed": 3}},
            "algorithm": {{"kind": "power"}},
            "adapter": "grl",
            "budget": 30,
            "seeds": [1, 2],
            "output": "{}"
        }}"#,
        out.display()
    )
}

#[test]
fn run_produces_expected_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write(dir.path(), "config.json", &minimal_config(&out));
    let output = bin().arg("run").arg(&cfg).arg("--jobs").arg("2").output().unwrap();
    run_ok(&output);

    let text = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "seed,rollout_index,return,evaluation_return");
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2 * 31);
    // budget/eval_interval + 1 evaluation rows per seed.
    let eval_rows = rows.iter().filter(|r| !r.ends_with(',')).count();
    assert_eq!(eval_rows, 2 * (30 / 10 + 1));
    assert!(out.join("config.echo").exists());
}

#[test]
fn unknown_env_kind_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write(
        dir.path(),
        "config.json",
        &minimal_config(&out).replace("quat_wahba", "cartpole"),
    );
    let output = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("config error"), "{stderr}");
}

#[test]
fn unknown_key_exits_2_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write(
        dir.path(),
        "config.json",
        &minimal_config(&out).replace("\"budget\": 30", "\"budget\": 30, \"bugdet\": 1"),
    );
    let output = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("bugdet"), "{stderr}");
    assert!(stderr.contains("line"), "diagnostic should carry a location: {stderr}");
}

#[test]
fn missing_config_file_exits_2() {
    let output = bin().arg("run").arg("/nonexistent/config.json").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    let cfg = write(dir.path(), "config.json", &minimal_config(&out1));
    run_ok(&bin().arg("run").arg(&cfg).output().unwrap());
    run_ok(&bin()
        .arg("run")
        .arg(&cfg)
        .arg("--output")
        .arg(&out2)
        .arg("--jobs")
        .arg("1")
        .output()
        .unwrap());
    assert_eq!(
        std::fs::read(out1.join("curve.csv")).unwrap(),
        std::fs::read(out2.join("curve.csv")).unwrap()
    );
}

#[test]
fn compare_emits_adapter_column_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let cfg = write(dir.path(), "config.json", &minimal_config(&out));
    let output = bin().arg("compare").arg(&cfg).output().unwrap();
    run_ok(&output);
    let text = std::fs::read_to_string(out.join("compare.csv")).unwrap();
    assert!(text.starts_with("adapter,seed,rollout_index,return,evaluation_return\n"));
    assert!(text.lines().any(|l| l.starts_with("grl,")));
    assert!(text.lines().any(|l| l.starts_with("normalize,")));
    assert!(!text.lines().any(|l| l.starts_with("cholesky,")));
    assert!(out.join("summary.csv").exists());
}

#[test]
fn selftest_filter_runs_and_passes() {
    let output = bin()
        .arg("selftest")
        .arg("--filter")
        .arg("mandel")
        .output()
        .unwrap();
    run_ok(&output);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("PASS mandel_isometry_round_trip"), "{stdout}");
}
