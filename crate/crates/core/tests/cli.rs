use std::fs;
use std::path::Path;

use dicke::cli::run;
use serde_json::Value;

fn dicke(args: &[&str], outdir: &Path) -> i32 {
    let mut argv = vec!["dicke"];
    argv.extend_from_slice(args);
    let out = outdir.to_str().unwrap();
    argv.extend_from_slice(&["--outdir", out]);
    run(argv)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn spectrum_writes_manifest_and_refuses_reuse() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    assert_eq!(dicke(&["spectrum", "--g", "0.5", "--n-states", "40"], &out), 0);
    let m = manifest(&out);
    assert_eq!(m["status"], "passed");
    assert_eq!(m["command"], "spectrum");
    assert!(m["results"]["convergence"]["converged"].as_bool().unwrap());
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41);

    assert_eq!(dicke(&["spectrum", "--g", "0.5", "--n-states", "40"], &out), 2);
    assert_eq!(manifest(&out)["status"], "passed");
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(dicke(&["spectrum", "--bogus"], &tmp.path().join("a")), 2);
    assert_eq!(dicke(&["spectrum", "--drive-x", "0.1", "--n-states", "16"], &tmp.path().join("b")), 2);
    assert_eq!(manifest(&tmp.path().join("b"))["status"], "error");
    assert_eq!(dicke(&["spectrum", "--n-states", "0"], &tmp.path().join("c")), 2);
    assert_eq!(dicke(&["multiqubit-check", "--n-qubits", "3"], &tmp.path().join("d")), 2);
    assert_eq!(dicke(&["trap-sim", "--env-qubit-modes", "1:x"], &tmp.path().join("e")), 2);
}

#[test]
fn unconverged_truncation_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    assert_eq!(dicke(&["spectrum", "--g", "3", "--n-states", "40", "--s-max", "164"], &out), 1);
    assert_eq!(manifest(&out)["status"], "failed");
}

#[test]
fn classify_and_recurrence_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("classify");
    assert_eq!(dicke(&["classify", "--n-states", "120", "--emit-plot-data"], &out), 0);
    for f in ["spectrum.csv", "diagnostics.csv", "classes.csv", "plot.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let m = manifest(&out);
    let singlet = m["results"]["classes"]["singlet_spacing"]["mean"].as_f64().unwrap();
    assert!((singlet - 2.0).abs() <= 1e-9);

    let out = tmp.path().join("recurrence");
    assert_eq!(dicke(&["recurrence-check", "--n-states", "120"], &out), 0);
    assert!(out.join("residuals.csv").exists());
}

#[test]
fn trap_simulation_outcomes() {
    let tmp = tempfile::tempdir().unwrap();
    let common = ["--photon-truncation", "4", "--t-max", "20", "--n-times", "41", "--drive-x", "0.3"];
    let out = tmp.path().join("dicke");
    assert_eq!(dicke(&[&["trap-sim"], &common[..]].concat(), &out), 0);
    assert_eq!(fs::read_to_string(out.join("fidelity.csv")).unwrap().lines().count(), 42);

    let out = tmp.path().join("variant");
    let args = [&["trap-sim", "--model", "variant", "--drive-y", "0.3"], &common[..]].concat();
    assert_eq!(dicke(&args, &out), 0);
    assert!(!manifest(&out)["results"]["expect_trapped"].as_bool().unwrap());
}

#[test]
fn multiqubit_check_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("mq");
    assert_eq!(dicke(&["multiqubit-check", "--n-qubits", "4", "--photon-truncation", "3"], &out), 0);
    assert_eq!(manifest(&out)["status"], "passed");
}
