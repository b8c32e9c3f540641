use std::process::Command;

use amgkit::bench::{run_benchmark, BenchConfig, BenchReport, CsvRow, Preset, CSV_COLUMNS};

fn amgbench(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_amgbench"))
        .args(args)
        .output()
        .expect("spawn amgbench")
}

#[test]
fn vbm_iterations_are_nearly_mesh_independent() {
    let small = run_benchmark(&BenchConfig::preset(Preset::Vbm, 32, 32, 32)).unwrap();
    let large = run_benchmark(&BenchConfig::preset(Preset::Vbm, 64, 64, 64)).unwrap();
    let (a, b) = (small.report.stats.iterations, large.report.stats.iterations);
    assert!(small.report.stats.converged && large.report.stats.converged);
    assert!(a.abs_diff(b) <= 10, "{a} vs {b} iterations");
}

#[test]
fn shard_count_does_not_change_the_report() {
    let mut cfg = BenchConfig::preset(Preset::Smatch, 20, 20, 20);
    let one = run_benchmark(&cfg).unwrap();
    cfg.shards = 4;
    let four = run_benchmark(&cfg).unwrap();
    let (r1, r4) = (&one.report, &four.report);
    assert_eq!(r1.stats.iterations, r4.stats.iterations);
    assert_eq!(r1.level_sizes, r4.level_sizes);
    assert_eq!(r1.level_nnz, r4.level_nnz);
    assert_eq!(r1.operator_complexity, r4.operator_complexity);
    let diff = one
        .solution
        .iter()
        .zip(&four.solution)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(diff <= 1e-10);
}

#[test]
fn small_vbm_complexity_is_moderate() {
    let run = run_benchmark(&BenchConfig::preset(Preset::Vbm, 16, 16, 16)).unwrap();
    let c = run.report.operator_complexity;
    assert!((1.2..=2.0).contains(&c), "complexity {c}");
}

#[test]
fn every_preset_converges_in_every_format() {
    for preset in [Preset::Vbm, Preset::Smatch, Preset::Vmatch] {
        for format in [amgkit::sparse::Format::Ell, amgkit::sparse::Format::Hll] {
            let cfg = BenchConfig {
                format,
                shards: 3,
                ..BenchConfig::preset(preset, 12, 10, 8)
            };
            let r = run_benchmark(&cfg).unwrap().report;
            assert!(r.stats.converged, "{preset} {format}");
            assert!(r.true_relative_residual <= 1.01e-6);
        }
    }
}

#[test]
fn cli_writes_json_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = amgbench(&[
        "--nx",
        "8",
        "--ny",
        "8",
        "--nz",
        "8",
        "--preset",
        "vmatch",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: BenchReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.n_unknowns, 512);
    assert_eq!(report.config.preset, Preset::Vmatch);
    assert!(report.stats.converged);
}

#[test]
fn cli_appends_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    for preset in ["vbm", "smatch"] {
        let out = amgbench(&[
            "--nx",
            "6",
            "--ny",
            "6",
            "--nz",
            "6",
            "--preset",
            preset,
            "--shards",
            "2",
            "--report",
            "csv",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut rd = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_COLUMNS);
    let rows: Vec<CsvRow> = rd.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].preset, "vbm");
    assert_eq!(rows[1].preset, "smatch");
    assert_eq!(rows[1].shards, 2);
}

#[test]
fn cli_reports_non_convergence_with_exit_two() {
    let out = amgbench(&[
        "--nx", "10", "--ny", "10", "--nz", "10", "--maxit", "1", "--tol", "1e-12",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOT converged"));
}

#[test]
fn cli_rejects_bad_input_with_exit_one() {
    assert_eq!(amgbench(&["--nx", "1"]).status.code(), Some(1));
    assert_eq!(amgbench(&["--shards", "0"]).status.code(), Some(1));
    assert_eq!(amgbench(&["--coarse", "lu:3"]).status.code(), Some(1));
    let out = amgbench(&[
        "--nx",
        "4",
        "--ny",
        "4",
        "--nz",
        "4",
        "--out",
        "/nonexistent/dir/r.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/r.json"));
}
