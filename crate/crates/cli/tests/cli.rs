use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_henon-morse");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn solve_into(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("profile.csv");
    let out = run(&[
        "solve", "--alpha", "2", "--p", "3", "--nodal", "2", "--grid", "600", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn solve_writes_a_profile_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = solve_into(dir.path());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# henon-morse"));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(lines.next(), Some("r,u,du"));
    assert_eq!(lines.count(), 600);

    let out = run(&["solve", "--alpha", "2", "--p", "3", "--nodal", "2", "--grid", "600", "--out",
        dir.path().join("again.csv").to_str().unwrap()]);
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["tool"], "henon-morse");
    assert_eq!(summary["report"]["nodal_sets"], 2);
    assert_eq!(summary["report"]["zeros"].as_array().unwrap().len(), 1);
}

#[test]
fn spectrum_reads_back_a_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = solve_into(dir.path());
    let out = run(&["spectrum", "--profile", path.to_str().unwrap(), "--modes", "3", "--count", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "k,index,lambda");
    // the per-mode count is raised to n + 2 when that is larger
    assert_eq!(rows.len(), 1 + 4 * 4);
    let radial: Vec<f64> = rows[1..]
        .iter()
        .filter(|r| r.starts_with("0,"))
        .map(|r| r.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(radial.iter().filter(|l| **l < 0.0).count(), 2);
}

#[test]
fn morse_reports_index_above_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = solve_into(dir.path());
    let out = run(&["morse", "--profile", path.to_str().unwrap()]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let total = json["report"]["total"].as_u64().unwrap();
    let bound = json["report"]["bound"].as_u64().unwrap();
    assert!(total >= bound);
    assert_eq!(json["report"]["verdict"], true);
}

#[test]
fn transform_check_defaults_kappa_from_alpha() {
    let out = run(&["transform", "check", "--alpha", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["report"]["kappa"].as_f64(), Some(0.5));
    assert_eq!(json["report"]["pass"], true);
}

#[test]
fn verify_emits_plot_series_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    let report = dir.path().join("out/verdict.json");
    let out = run(&[
        "verify", "--alpha", "2", "--p", "3", "--nodal", "2", "--grid", "1000",
        "--emit-plots", plots.to_str().unwrap(), "--out", report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["report"]["pass"], true);
    assert!(json["report"]["checks"].as_array().unwrap().len() >= 9);
    let lowest = std::fs::read_to_string(plots.join("alpha2-p3-n2-lowest.csv")).unwrap();
    assert!(lowest.lines().any(|l| l == "k,lambda1"));
    assert!(plots.join("alpha2-p3-n2-profile.csv").exists());
}

#[test]
fn usage_errors_exit_with_three() {
    for args in [
        &["verify", "--alpha", "-1", "--p", "3", "--nodal", "1"][..],
        &["solve", "--alpha", "0", "--p", "1", "--nodal", "1"],
        &["solve", "--alpha", "0", "--p", "3", "--nodal", "0"],
        &["solve", "--alpha", "0", "--p", "3", "--nodal", "1", "--grid", "8"],
        &["solve", "--alpha", "0", "--p", "3", "--nodal", "1", "--domain", "annulus:2:1"],
        &["frobnicate"],
        &["verify", "--p", "3"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn missing_profile_is_an_io_failure() {
    let out = run(&["morse", "--profile", "/nonexistent/profile.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coarse_grid_verification_failures_exit_with_one() {
    // 60 points cannot resolve the correspondence bound at three nodal sets
    let out = run(&["verify", "--alpha", "4", "--p", "2", "--nodal", "3", "--grid", "60"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn thread_count_must_be_positive() {
    let out = Command::new(BIN)
        .args(["transform", "check", "--grid", "50"])
        .env("HENON_MORSE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let ok = Command::new(BIN)
        .args(["transform", "check", "--kappa", "2"])
        .env("HENON_MORSE_THREADS", "2")
        .output()
        .unwrap();
    assert!(ok.status.success());
}
