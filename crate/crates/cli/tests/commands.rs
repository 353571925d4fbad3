use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

fn unotsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unotsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("commands").join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn digests(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, Sha256::digest(fs::read(p).unwrap()).to_vec())
        })
        .collect()
}

const RUN_ARGS: [&str; 8] = ["run", "--state", "antialigned", "--apply-unot", "--seed", "3", "--resamples", "50"];

/// One short full run shared by the report tests.
fn full_run() -> &'static PathBuf {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = scratch("full-run");
        let mut args = RUN_ARGS.to_vec();
        args.extend(["--out", dir.to_str().unwrap()]);
        let out = unotsim(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        dir
    })
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn theory_prints_and_writes() {
    let dir = scratch("theory");
    let out = unotsim(&["theory", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("0.0817"), "{stdout}");
    assert!(stdout.contains("note: discord-reading"));
    assert_eq!(lines(&dir.join("theory.csv")).len(), 5);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert!(report.get("experiment").is_none());
    assert_eq!(report["version"], 1);
}

#[test]
fn invalid_configurations_exit_with_code_2() {
    for (args, needle) in [
        (vec!["run", "--state", "aligned", "--shots", "0"], "shots"),
        (vec!["run", "--state", "aligned", "--resamples", "10"], "resamples"),
        (vec!["run", "--state", "aligned", "--fock-cutoff", "3"], "fock cutoff"),
        (vec!["run", "--state", "sideways"], "sideways"),
        (vec!["report", "--out", "unused"], "at least one input"),
    ] {
        let out = unotsim(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(needle), "{args:?}");
    }
}

#[test]
fn identical_runs_write_identical_artifacts() {
    let first = full_run();
    let second = scratch("full-run-again");
    let mut args = RUN_ARGS.to_vec();
    args.extend(["--out", second.to_str().unwrap()]);
    assert!(unotsim(&args).status.success());
    let (a, b) = (digests(first), digests(&second));
    assert_eq!(a.len(), 6, "{a:?}");
    assert_eq!(a, b);
}

#[test]
fn run_report_has_both_states() {
    let text = fs::read_to_string(full_run().join("report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    let e = &report["experiment"];
    assert_eq!(e["before"]["target"], "antialigned");
    assert_eq!(e["after"]["target"], "aligned");
    assert_eq!(e["total_trials"], 2 * 102_000);
    for when in ["before", "after"] {
        assert!(e[when]["fidelity"]["value"].as_f64().unwrap() >= 0.99);
    }
    assert!(e["change"]["discord"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn theory_only_report_marks_experiment_absent() {
    let theory = scratch("theory-input");
    assert!(unotsim(&["theory", "--out", theory.to_str().unwrap()]).status.success());
    let out = scratch("theory-report");
    let status = unotsim(&["report", theory.join("report.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    let fig4 = lines(&out.join("figure4.csv"));
    assert_eq!(fig4.len(), 7);
    for row in &fig4[1..] {
        assert!(row.ends_with("absent,absent,absent,absent"), "{row}");
    }
    assert_eq!(lines(&out.join("runs.csv")).len(), 1);
    assert_eq!(lines(&out.join("figure3.csv")).len(), 1);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["runs"].as_array().unwrap().len(), 0);
    assert_eq!(summary["discrepancy_flags"].as_array().unwrap().len(), 1);
}

#[test]
fn full_run_report_tables() {
    let out = scratch("run-report");
    let input = full_run().join("report.json");
    assert!(unotsim(&["report", input.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
    let runs = lines(&out.join("runs.csv"));
    assert_eq!(runs.len(), 2);
    for col in ["J_before", "J_after", "delta_before", "delta_after", "I_before", "I_after", "delta_after_half_width"] {
        assert!(runs[0].split(',').any(|h| h == col), "{col}");
    }
    assert!(!runs[1].contains("absent"));
    // Started from the anti-aligned state only, so the aligned-start columns stay empty.
    for row in &lines(&out.join("figure4.csv"))[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_ne!(cells[3], "absent");
        assert_eq!(&cells[5..], ["absent", "absent"]);
    }
    let fig3 = lines(&out.join("figure3.csv"));
    assert!(fig3[1].contains(",antialigned,") && fig3[1].contains(",aligned,"));
}

#[test]
fn schema_errors_name_path_and_field() {
    let dir = scratch("bad-input");
    fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("broken.json");
    let mut report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(full_run().join("report.json")).unwrap()).unwrap();
    report["theory"]["aligned"].as_object_mut().unwrap().remove("classical");
    fs::write(&bad, report.to_string()).unwrap();
    let out = unotsim(&["report", bad.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.json") && err.contains("theory.aligned"), "{err}");

    report["theory"]["aligned"]["classical"] = serde_json::json!(0.08);
    report["version"] = serde_json::json!(9);
    fs::write(&bad, report.to_string()).unwrap();
    let err = String::from_utf8_lossy(&unotsim(&["report", bad.to_str().unwrap()]).stderr).into_owned();
    assert!(err.contains("field `version`"), "{err}");
}
