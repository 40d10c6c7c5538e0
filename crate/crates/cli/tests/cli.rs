use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rotor_core::born::cross_section_structureless;
use rotor_core::{Peak, PeakShape, PotentialSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rotor-scatter"))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    names
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn minimal_profile_matches_structureless_engine() {
    let out = tempfile::tempdir().unwrap();
    let config = configs().join("minimal.json");
    let status = run(&[
        "profile",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--format",
        "csv,json,svg",
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let names = files(out.path());
    assert_eq!(names.len(), 3, "{names:?}");
    let csv_name = names.iter().find(|n| n.ends_with(".csv")).unwrap();
    assert!(csv_name.starts_with("profile-") && csv_name.ends_with("-general.csv"));
    let csv = fs::read_to_string(out.path().join(csv_name)).unwrap();
    assert!(csv.starts_with("theta,sigma,sigma_0_0\n"));
    assert!(!csv.contains('\r'));
    let spec = PotentialSpec::new(vec![Peak {
        center_x: 0.0,
        shape: PeakShape::gaussian(2.0, 1.0).unwrap(),
    }])
    .unwrap();
    for row in rows(&csv) {
        let expected = cross_section_structureless(row[0], 2.0, 2.0, &spec);
        assert!((row[1] - expected).abs() <= 1e-6 * expected, "{row:?} vs {expected}");
    }
}

#[test]
fn malformed_json_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "{ not json");
    let out = run(&[
        "profile",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));
}

#[test]
fn invalid_fields_are_all_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"molecule": {"mass": -1, "alpha": -2}, "beam": {"k": 1},
            "potential": {"kind": "peaks", "peaks": []}}"#,
    );
    let out = run(&["profile", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("molecule.mass"), "{err}");
    assert!(err.contains("half_separation must be ≥ 0"), "{err}");
}

#[test]
fn empty_k_list_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"molecule": {"mass": 1, "alpha": 1}, "beam": {"k": 1},
            "potential": {"kind": "grating", "grating": {"n": 1, "d": 6,
                "shape": {"variant": "gaussian", "v0": 1, "delta": 1}}},
            "scan": {"k": []}}"#,
    );
    let out = run(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn closed_form_on_wrong_potential_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"molecule": {"mass": 1, "alpha": 1}, "beam": {"k": 1},
            "potential": {"kind": "peaks", "peaks": [
                {"center": 0.5, "shape": {"variant": "gaussian", "v0": 1, "delta": 1}}]},
            "engine": {"variant": "closed_grating"}}"#,
    );
    let out = run(&[
        "profile",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["profile"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["validate", "--only", "nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn validate_only_runs_the_named_group() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["validate", "--only", "ft,parity", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["all_pass"], true);
    let groups: Vec<&str> =
        report["checks"].as_array().unwrap().iter().map(|c| c["group"].as_str().unwrap()).collect();
    assert!(groups.contains(&"ft") && groups.contains(&"parity"));
    assert!(groups.iter().all(|g| *g == "ft" || *g == "parity"), "{groups:?}");
    let names = files(dir.path());
    assert_eq!(names.len(), 1);
    assert!(names[0].starts_with("validate-") && names[0].ends_with("-report.json"));
}

#[test]
fn bessel_table_prints_csv() {
    let out = run(&["bessel-table", "--n-max", "3", "--x", "2.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,J_n");
    assert_eq!(lines.len(), 5);
    let j0: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((j0 - (-0.048_383_776_468_198)).abs() < 1e-15, "{j0}");
}

#[test]
fn sweeps_are_byte_identical_across_runs_and_threads() {
    let config = configs().join("grating-n2.json");
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--paired",
            "--format",
            "json,csv",
            "--threads",
            threads,
        ]);
        assert!(out.status.success());
        let names = files(dir.path());
        let bodies: Vec<Vec<u8>> =
            names.iter().map(|n| fs::read(dir.path().join(n)).unwrap()).collect();
        outputs.push((names, bodies));
    }
    assert_eq!(outputs[0].0.len(), 4);
    assert_eq!(outputs[0], outputs[1]);
    let csv = String::from_utf8(outputs[0].1[0].clone()).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 21);
    assert_eq!(csv.lines().count(), 182);
}

#[test]
fn grid_overrides_change_the_manifest() {
    let config = configs().join("two-slit-d2.json");
    let dir = tempfile::tempdir().unwrap();
    let args = |extra: &[&str]| {
        let mut v = vec![
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ];
        v.extend_from_slice(extra);
        v.into_iter().map(String::from).collect::<Vec<_>>()
    };
    assert!(bin().args(args(&[])).status().unwrap().success());
    assert!(bin()
        .args(args(&[
            "--theta-min",
            "-0.5",
            "--theta-max",
            "0.5",
            "--theta-steps",
            "11",
            "--k",
            "1,2"
        ]))
        .status()
        .unwrap()
        .success());
    let names = files(dir.path());
    assert_eq!(names.len(), 2);
    let small = names
        .iter()
        .map(|n| fs::read_to_string(dir.path().join(n)).unwrap())
        .find(|s| s.lines().count() == 12)
        .expect("overridden grid");
    assert!(small.starts_with("theta,k=1.0000000000000000e0,k=2.0000000000000000e0\n"));
}

#[test]
fn compare_reports_mixed_pair_visibilities() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("mixed-pair.json");
    let out = run(&[
        "compare",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["engine"], "closed_mixed");
    assert_eq!(report["structureless_engine"], "closed_structureless_mixed");
    let ratio = report["suppression_ratio"].as_f64().unwrap();
    let v_int = report["visibility_internal"].as_f64().unwrap();
    let v_str = report["visibility_structureless"].as_f64().unwrap();
    assert_eq!(ratio, v_int / v_str);
    assert_eq!(files(dir.path()).len(), 3);
}
