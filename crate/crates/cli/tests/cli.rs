use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bubblecasimir"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn spectrum_default_summary_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "grid_points = 3\n");
    let csv = dir.path().join("s.csv");
    let out = run(&["spectrum", "--config", &cfg, "--output", csv.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let n = summary["total_photons"].as_f64().unwrap();
    assert!((n - 1.06e6).abs() < 0.05 * 1.06e6, "{n}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("x,dn_dx,dn_dx_infinite_volume,frequency_phz"));
    assert_eq!(data_rows(&text).len(), 3);
}

#[test]
fn frequency_column_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "grid_points = 2\nx_star = 11.5\n");
    let out = run(&["infinite-volume", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    // Upper end is x_* + 3 = 14.5.
    let nu = rows[1][2] * 11.5 / rows[1][0];
    assert!((nu - 1.1).abs() < 0.01, "{nu}");
    assert_eq!(rows[1][1], 0.0);
}

#[test]
fn null_contrast_gives_zero_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_gas_in = 1.3\nn_gas_out = 1.3\ngrid_points = 20\n");
    let out = run(&["spectrum", "--config", &cfg, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert!(rows.iter().all(|r| r[1] == 0.0 && r[2] == 0.0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["total_photons"].as_f64(), Some(0.0));
}

#[test]
fn csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_gas_in = 71\nn_gas_out = 25\ngrid_points = 40\n");
    let a = run(&["spectrum", "--config", &cfg]).stdout;
    let b = bin()
        .args(["spectrum", "--config", &cfg])
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap()
        .stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn csv_values_round_trip() {
    let out = run(&["kernel-dump", "--x-range", "1:3", "--y-range", "1:3", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(v.to_string(), field);
        }
    }
}

#[test]
fn kernel_dump_diagonal_matches_d_exact() {
    let out = run(&["kernel-dump", "--x-range", "2:8", "--y-range", "2:8", "--steps", "3"]);
    let kernel = data_rows(&String::from_utf8(out.stdout).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "grid_points = 3\n");
    let out = run(&["diagonal", "--config", &cfg, "--range", "2:8"]);
    assert_eq!(out.status.code(), Some(0));
    let diag = data_rows(&String::from_utf8(out.stdout).unwrap());
    for d in &diag {
        let k = kernel.iter().find(|r| r[0] == d[0] && r[1] == d[0]).unwrap();
        assert!((k[2] - d[1]).abs() < 1e-6 * d[1], "{k:?} vs {d:?}");
    }
}

#[test]
fn kernel_dump_empty_range_is_usage_error() {
    let out = run(&["kernel-dump", "--x-range", "4:4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "raduis = 500\n");
    assert_eq!(run(&["spectrum", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "radius = -1\n");
    assert_eq!(run(&["spectrum", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--config", "/nonexistent/run.cfg"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--kernel", "fancy"]).status.code(), Some(2));
}

#[test]
fn quadrature_failure_exits_3_with_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "rel_tol = 1e-15\nabs_tol = 1e-300\nmax_subdivisions = 2\n");
    let out = run(&["spectrum", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("achieved error"), "{msg}");
}

#[test]
fn table_rows_within_tolerance() {
    let out = run(&["table", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 5);
    let row = rows.iter().find(|r| r["n_in"] == 71.0).unwrap();
    assert!((row["photons"].as_f64().unwrap() - 1.0e6).abs() < 0.05e6);
    assert!((row["mean_ratio"].as_f64().unwrap() - 0.75).abs() < 0.02);
}

#[test]
fn include_tails_changes_domain() {
    let base = run(&["spectrum", "--json"]);
    let tails = run(&["spectrum", "--json", "--include-tails", "20"]);
    assert_eq!(tails.status.code(), Some(0));
    let rows = data_rows(&String::from_utf8_lossy(&tails.stdout));
    assert_eq!(rows.last().unwrap()[0], 20.0);
    let n = |o: &Output| serde_json::from_slice::<serde_json::Value>(&o.stderr).unwrap()["total_photons"].as_f64().unwrap();
    assert!(n(&tails) != n(&base));
}

#[test]
fn check_passes_and_perturbed_threshold_fails() {
    let out = run(&["check", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    let recs: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(recs.len() > 5 && recs.iter().all(|r| r["passed"] == true));

    let out = run(&["check", "--threshold-scale", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("worst"));
}
