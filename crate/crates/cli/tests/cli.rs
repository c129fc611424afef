use std::path::Path;
use std::process::{Command, Output};

fn mtea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtea")).args(args).output().unwrap()
}

fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("exp.toml");
    std::fs::write(
        &path,
        format!(
            "[experiment]\ninstances = [\"CILS\"]\nalgorithms = [\"dual\", \"external-only\"]\n\
             repetitions = 2\nbudget_per_task = 500\ncheckpoint_interval = 200\noutput_dir = \"out\"\n{extra}"
        ),
    )
    .unwrap();
    path
}

#[test]
fn suite_lists_nine_instances() {
    let out = mtea(&["suite"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    for name in ["CIHS", "PIMS", "NILS"] {
        assert!(text.contains(name));
    }
}

#[test]
fn validate_reports_errors_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    let good = write_config(tmp.path(), "");
    let out = mtea(&["validate", good.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("ok: 1 instances, 2 algorithms"));

    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "[experiment]\ninstances = [\"CILS\"]\nalgorithms = [\"dual\"]\nrepetitions = 0\n").unwrap();
    let out = mtea(&["validate", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 4") && err.contains("repetitions must be ≥ 1"), "{err}");
}

#[test]
fn run_then_summarize() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let custom = tmp.path().join("elsewhere");
    let out = mtea(&["run", cfg.to_str().unwrap(), "--workers", "2", "--output", custom.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("completed 4 runs"));
    assert!(custom.join("runs/CILS/external-only/rep2/convergence.csv").exists());
    assert!(!tmp.path().join("out").exists());

    let before = std::fs::read(custom.join("summary/igd.csv")).unwrap();
    std::fs::remove_dir_all(custom.join("summary")).unwrap();
    let out = mtea(&["summarize", custom.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(before, std::fs::read(custom.join("summary/igd.csv")).unwrap());
}

#[test]
fn zero_workers_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let out = mtea(&["run", cfg.to_str().unwrap(), "--workers", "0"]);
    assert!(!out.status.success());
}
