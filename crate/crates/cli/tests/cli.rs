use std::fs;
use std::process::{Command, Output};

use quadbench::heat::CoefficientFile;
use quadbench::training::TrainingData;
use quadbench::{NoiseReport, Recommendation, SolutionGrid, SweepReport};

fn quadbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadbench"))
        .args(args)
        .env_remove("QUADBENCH_DIGITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn exact_quartic_prints_sixteen_fifteenths() {
    let o = quadbench(&["integrate", "--integrand", "quartic", "--variant", "exact", "--rule", "gk15"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("1.066666666666667"));
    assert!(stdout(&o).contains("fevals     15"));
}

#[test]
fn collapse_is_silent() {
    let o = quadbench(&["integrate", "--variant", "double", "--delta", "250000", "--rule", "gk15"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("value      0.000000000000000"));
    assert!(stderr(&o).is_empty());
}

#[test]
fn exhausted_budget_exits_two() {
    let o = quadbench(&["integrate", "--variant", "double", "--delta", "100000", "--rule", "simpson"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Maximum function count exceeded"));

    let o = quadbench(&["integrate", "--variant", "double", "--delta", "100000", "--rule", "gk15"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Reached the limit on the maximum number of intervals"));
}

#[test]
fn usage_errors_exit_sixty_four() {
    let cases: &[&[&str]] = &[
        &["integrate", "--rule", "midpoint"],
        &["integrate", "--delta=-5"],
        &["integrate", "--rule", "trapz", "--step", "0.3"],
        &["integrate", "--digits", "8", "--variant", "hiprec"],
        &["integrate", "--integrand", "finance", "--coefficient", "1"],
        &["integrate", "--abstol", "0"],
        &["sweep", "--rule", ""],
        &["diagnose", "--grid-size", "4"],
        &["frobnicate"],
        &[],
    ];
    for args in cases {
        let o = quadbench(args);
        assert_eq!(o.status.code(), Some(64), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(quadbench(&["--help"]).status.code(), Some(0));
    assert_eq!(quadbench(&["--version"]).status.code(), Some(0));
}

#[test]
fn digits_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_quadbench"))
        .args(["integrate", "--variant", "hiprec"])
        .env("QUADBENCH_DIGITS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
    let o = Command::new(env!("CARGO_BIN_EXE_quadbench"))
        .args(["integrate", "--variant", "hiprec", "--delta", "250000"])
        .env("QUADBENCH_DIGITS", "40")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1.066666666666667"));
}

#[test]
fn integrate_json_is_a_quadrature_result() {
    let o = quadbench(&["integrate", "--variant", "hiprec", "--rule", "lobatto", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fevals"], 18);
    assert!((v["value"].as_f64().unwrap() - 16.0 / 15.0).abs() < 1e-15);
}

#[test]
fn finance_integral_in_high_precision() {
    let o = quadbench(&["integrate", "--integrand", "finance", "--variant", "hiprec", "--sigma", "0.001"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("finance-hiprec"));
}

#[test]
fn sweep_csv_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = quadbench(&[
        "sweep",
        "--delta",
        "1000,250000",
        "--rule",
        "gk15,trapz",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = SweepReport::read_csv(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 2 * 3 * 2);
    assert_eq!(report.reference_row(1000.0).unwrap().error_vs_reference, 0.0);
    let mut again = Vec::new();
    report.write_csv(&mut again).unwrap();
    assert_eq!(again, fs::read(&out).unwrap());
}

#[test]
fn sweep_markdown_table() {
    let o = quadbench(&["sweep", "--delta", "250000", "--rule", "gk15", "--variant", "double,hiprec"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("| Rule | Param | Variant | Value | Error | Time [s] | Fevals | Warning |\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn diagnose_reports_collapse() {
    let o = quadbench(&["diagnose", "--delta", "250000"]);
    assert_eq!(o.status.code(), Some(0));
    let report: NoiseReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report.collapse);
    assert_eq!(report.recommendation, Recommendation::Collapsed);
    assert!(stderr(&o).contains("hiprec(32)"));
}

#[test]
fn heat_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = quadbench(&["heat", "--modes", "6", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let clean = SolutionGrid::read_csv(fs::File::open(dir.path().join("clean.csv")).unwrap()).unwrap();
    let corrupted = SolutionGrid::read_csv(fs::File::open(dir.path().join("corrupted.csv")).unwrap()).unwrap();
    assert_eq!((clean.t.len(), clean.x.len()), (101, 201));
    assert_eq!((corrupted.t.len(), corrupted.x.len()), (101, 201));
    let bias = quadbench::heat::read_bias_csv(fs::File::open(dir.path().join("bias.csv")).unwrap()).unwrap();
    assert_eq!(bias.len(), 101);
    assert!(bias[0].1 > bias[100].1);
    for name in ["coefficients_clean.json", "coefficients_corrupted.json"] {
        let doc = CoefficientFile::read(fs::File::open(dir.path().join(name)).unwrap()).unwrap();
        assert_eq!(doc.coefficients.len(), 6);
    }
}

#[test]
fn collapsed_heat_run_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = quadbench(&["heat", "--modes", "4", "--delta", "250000", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let corrupted = SolutionGrid::read_csv(fs::File::open(dir.path().join("corrupted.csv")).unwrap()).unwrap();
    assert!(corrupted.u.iter().flatten().all(|&u| u == 0.0));
}

#[test]
fn training_data_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let o = quadbench(&[
        "emit-training-data",
        "--variant",
        "double",
        "--delta",
        "250000",
        "--alpha",
        "0.2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let data = TrainingData::read_dir(dir.path()).unwrap();
    assert_eq!(data.alpha, 0.2);
    assert_eq!((data.initial.len(), data.boundary.len(), data.interior.len()), (50, 50, 10000));
    assert!(data.initial.iter().all(|r| r.value == 0.0 && r.variant == "double"));
}
