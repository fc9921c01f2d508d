use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cds-aoa"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn scan_flags_microsoft_and_sets_exit_code() {
    let input = fixture("anomalies.csv");
    let clean = run(&["scan", "--input", input.to_str().unwrap()]);
    assert_eq!(clean.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&clean)).unwrap();
    assert_eq!(json["total_anomalies"], 2);
    assert_eq!(json["by_pair"]["5y-10y"], 1);

    let strict = run(&["scan", "--input", input.to_str().unwrap(), "--fail-on-anomaly"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn missing_inputs_exit_with_two() {
    let input = fixture("anomalies.csv");
    let o = run(&["scan", "--input", input.to_str().unwrap(), "--condition", "thm2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("discount"));

    let o = run(&["scan", "--input", "/nonexistent/quotes.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn discounted_conditions_and_csv_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let input = fixture("anomalies.csv");
    let disc = fixture("discount_flat3.csv");
    for cond in ["thm2", "thm3", "irs"] {
        let o = run(&[
            "scan", "--input", input.to_str().unwrap(), "--condition", cond,
            "--discount", disc.to_str().unwrap(), "--format", "csv",
            "--report", report.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{cond}: {}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(&report).unwrap();
        assert!(text.starts_with("section,group,key,value\n"));
        assert!(text.contains("MSFT"), "{cond}");
    }
}

#[test]
fn swap_curve_condition() {
    let input = fixture("anomalies.csv");
    let irs = fixture("irs_flat2.csv");
    let o = run(&["scan", "--input", input.to_str().unwrap(), "--condition", "irs", "--irs", irs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["by_pair"]["5y-10y"], 1);
}

#[test]
fn generate_then_scan_recovers_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let quotes = dir.path().join("quotes.csv");
    let manifest = dir.path().join("manifest.json");
    let plots = dir.path().join("plots");
    let o = run(&[
        "generate", "--output", quotes.to_str().unwrap(), "--manifest", manifest.to_str().unwrap(),
        "--curves", "300", "--violations", "12", "--seed", "7",
    ]);
    assert!(o.status.success());
    let o = run(&["scan", "--input", quotes.to_str().unwrap(), "--plot-data", plots.to_str().unwrap()]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let truth: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(report["total_anomalies"], truth["total"]);
    assert_eq!(report["by_pair"], truth["by_pair"]);
    assert_eq!(report["by_rating"], truth["by_rating"]);
    assert!(plots.join("monthly.csv").exists());
    let hyperbolas = fs::read_dir(&plots).unwrap().filter(|e| {
        e.as_ref().unwrap().file_name().to_string_lossy().starts_with("hyperbola_")
    });
    assert!(hyperbolas.count() >= 1);
}

#[test]
fn bootstrap_marks_negative_segments() {
    let input = fixture("anomalies.csv");
    let o = run(&["bootstrap", "--input", input.to_str().unwrap(), "--entity", "MSFT"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let neg: Vec<_> = out.lines().skip(1).filter(|l| l.ends_with(",1")).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(neg, ["4.000000", "7.000000"]);
}

#[test]
fn replay_starts_at_par() {
    let input = fixture("msft_path.csv");
    let o = run(&["replay", "--input", input.to_str().unwrap(), "--entity", "MSFT", "--short", "5y", "--long", "10y"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("date,mtm,dv01,cr01"));
    let first: Vec<f64> = lines.next().unwrap().split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!(first[2] > 0.0);
    assert_eq!(out.lines().count(), 23);
}

#[test]
fn irs_and_plot_outputs() {
    let o = run(&["irs", "--irs", fixture("irs_flat2.csv").to_str().unwrap(), "--step", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let five = out.lines().find(|l| l.starts_with("5.000000")).unwrap();
    let f: f64 = five.split(',').nth(2).unwrap().parse().unwrap();
    assert!((f - (-0.1f64).exp()).abs() < 1e-6);

    let o = run(&["plot", "--input", fixture("anomalies.csv").to_str().unwrap(), "--entity", "MSFT", "--anchor", "5y"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let flagged: Vec<_> = out.lines().filter(|l| l.contains(",quotes,1")).collect();
    assert_eq!(flagged, ["7.000000,45.000000,quotes,1", "10.000000,33.550000,quotes,1"]);
}
