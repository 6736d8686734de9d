//! End-to-end tests of the command-line binary: exit codes, file shapes,
//! config-file merging and byte-determinism of the artifacts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qtorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtorus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn validation_error_exits_2() {
    // lacunarity requires ratio >= 3
    let out = qtorus(&["riesz", "--ratio", "2", "--N", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = qtorus(&["riesz", "--theta", "not-a-number"]);
    assert_eq!(out.status.code(), Some(2));

    let out = qtorus(&["ornstein", "--theta", "1/0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn weyl_cap_exceeded_exits_4() {
    let out = qtorus(&["weyl", "--theta", "golden", "--theta0", "0.001", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn weyl_reports_rescaling() {
    let tmp = tempfile::tempdir().unwrap();
    let report = tmp.path().join("weyl.json");
    let out = qtorus(&[
        "weyl",
        "--theta",
        "sqrt2m1",
        "--theta0",
        "0.05",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("M0 = 13"), "{stdout}");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["format_version"], 1);
    assert_eq!(doc["report"]["m0"], 13);
    assert_eq!(doc["config"]["theta0"], 0.05);
}

#[test]
fn selftest_quick_passes_and_is_machine_readable() {
    let out = qtorus(&["selftest", "--quick", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(summary["seed"], 1);
    assert_eq!(summary["quick"], true);
    assert_eq!(summary["all_passed"], true);
    let results = summary["results"].as_array().unwrap();
    assert!(results.iter().any(|r| r["name"] == "mutation_guard" && r["passed"] == true));
}

#[test]
fn riesz_writes_deterministic_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir_a = tmp.path().join("a");
    let names = [
        "spectrum.csv",
        "riesz_coeffs.json",
        "riesz_coeffs.csv",
        "riesz_norms.json",
    ];
    // two runs with byte-identical config (including the output path)
    let mut first_run = Vec::new();
    for pass in 0..2 {
        let out = qtorus(&[
            "riesz",
            "--ratio",
            "3",
            "--N",
            "2",
            "--theta",
            "1/5",
            "--out",
            dir_a.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let contents: Vec<String> = names.iter().map(|n| read(&dir_a, n)).collect();
        if pass == 0 {
            first_run = contents;
            fs::remove_dir_all(&dir_a).unwrap();
        } else {
            for (name, (a, b)) in names.iter().zip(first_run.iter().zip(&contents)) {
                assert_eq!(a, b, "{name} differs between runs");
            }
        }
    }

    let spectrum = read(&dir_a, "spectrum.csv");
    assert!(spectrum.starts_with("# format_version: 1\n# config: "));
    assert!(spectrum.contains("j,xi,k1,k2,weight\n"));

    let norms: serde_json::Value =
        serde_json::from_str(&read(&dir_a, "riesz_norms.json")).unwrap();
    assert_eq!(norms["format_version"], 1);
    assert_eq!(norms["config"]["theta_resolved"], "1/5");
    assert!(norms["report"]["l1"].as_f64().unwrap() > 0.0);
    assert_eq!(norms["report"]["converged"], true);

    let coeffs: serde_json::Value =
        serde_json::from_str(&read(&dir_a, "riesz_coeffs.json")).unwrap();
    // N = 2: 4 spectral pairs plus the constant term
    assert_eq!(coeffs["polynomial"]["terms"].as_array().unwrap().len(), 9);
}

#[test]
fn ornstein_writes_sweep_and_plot_stub() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sweep");
    let out = qtorus(&[
        "ornstein",
        "--ratio",
        "3",
        "--N",
        "2",
        "--theta",
        "0",
        "--theta",
        "1/5",
        "--plot-stub",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = read(&dir, "ornstein.csv");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# format_version: 1"));
    assert!(lines.next().unwrap().starts_with("# config: "));
    assert_eq!(
        lines.next().unwrap(),
        "theta,N,norm_d1d1,norm_d2d2,norm_d1d2,norm_B,norm_E,norm_G,norm_P,grid,delta,converged"
    );
    // 2 thetas x N in {1, 2}
    assert_eq!(lines.count(), 4);

    let json: serde_json::Value = serde_json::from_str(&read(&dir, "ornstein.json")).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 4);
    assert_eq!(json["config"]["thetas_resolved"][1], "1/5");

    let tsv = read(&dir, "plot_data.tsv");
    assert!(tsv.contains("theta\tN\t"));
    assert!(read(&dir, "plot_norms.py").contains("plot_data.tsv"));
}

#[test]
fn config_file_is_merged_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let config_path = tmp.path().join("config.json");
    fs::write(
        &config_path,
        serde_json::json!({
            "ratio": 3,
            "n": 1,
            "theta": "1/5",
            "grid_max": 4096
        })
        .to_string(),
    )
    .unwrap();
    let dir = tmp.path().join("out");
    let out = qtorus(&[
        "riesz",
        "--config",
        config_path.to_str().unwrap(),
        "--N",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let norms: serde_json::Value =
        serde_json::from_str(&read(&dir, "riesz_norms.json")).unwrap();
    // flag wins over the file, file wins over the default
    assert_eq!(norms["config"]["n"], 2);
    assert_eq!(norms["config"]["theta"], "1/5");
    assert_eq!(norms["config"]["grid_max"], 4096);

    // unknown config keys are a validation error
    fs::write(&config_path, r#"{"ratioo": 3}"#).unwrap();
    let out = qtorus(&["riesz", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn irrational_theta_is_pinned_to_convergent() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let out = qtorus(&[
        "riesz",
        "--N",
        "1",
        "--theta",
        "sqrt2m1",
        "--q-max",
        "64",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let norms: serde_json::Value =
        serde_json::from_str(&read(&dir, "riesz_norms.json")).unwrap();
    assert_eq!(norms["config"]["theta_resolved"], "sqrt2m1~12/29");
}
