use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mismatch-sampler"));
    c.env_remove("MISMATCH_SAMPLER_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

/// Data lines of a CSV with its config line and header removed.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn gk_gaussian_table_decreases() {
    let rows = csv_rows(&ok(&["gk", "--g2", "0.99", "--n", "10"]));
    assert_eq!(rows.len(), 10);
    let g: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(g[0], 1.0);
    assert!((g[1] - 0.99).abs() < 1e-15);
    assert!(g.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn gk_zero_eta_is_ideal() {
    let rows = csv_rows(&ok(&["gk", "--eta", "0", "--n", "6"]));
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() == 1.0));
}

#[test]
fn gk_from_density_file() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.json");
    std::fs::write(&rho, r#"{"rows":2,"cols":2,"re":[0.7,0,0,0.3],"im":[0,0,0,0]}"#).unwrap();
    let v = json(&[
        "gk",
        "--rho-file",
        rho.to_str().unwrap(),
        "--n",
        "4",
        "--format",
        "json",
    ]);
    let g: Vec<f64> = v["result"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["g_k"].as_f64().unwrap())
        .collect();
    for (got, want) in g.iter().zip([1.0, 0.58, 0.37, 0.2482]) {
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }
    assert_eq!(v["config"]["source"]["model"], "density");
}

#[test]
fn prob_hom_dip() {
    let v = json(&[
        "prob",
        "--beam-splitter",
        "--inputs",
        "1,2",
        "--outputs",
        "1,2",
        "--g2",
        "0.99",
    ]);
    assert!((v["result"]["value"].as_f64().unwrap() - 0.005).abs() < 1e-12);
    assert_eq!(v["result"]["path"], "general");
    let ideal = json(&[
        "prob",
        "--beam-splitter",
        "--inputs",
        "1,2",
        "--outputs",
        "1,2",
        "--g",
        "1,1",
    ]);
    assert_eq!(ideal["result"]["path"], "ideal");
    assert_eq!(ideal["result"]["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn prob_rejects_bad_occupations() {
    let o = run(&[
        "prob",
        "--haar",
        "4",
        "--inputs",
        "1,2",
        "--occupations",
        "1,1,1,0",
        "--g2",
        "0.9",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn prob_general_path_capacity() {
    let o = run(&[
        "prob",
        "--haar",
        "12",
        "--inputs",
        "1,2,3,4,5,6,7,8,9",
        "--outputs",
        "1,2,3,4,5,6,7,8,9",
        "--g2",
        "0.9",
        "--path",
        "general",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn curve_default_family() {
    let text = ok(&["curve"]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 6 * 49);
    assert_eq!(text.lines().nth(1).unwrap(), "g2,N,V,V_cuberoot,V_approx_cuberoot");
}

#[test]
fn curve_approx_column_and_ideal_row() {
    let text = ok(&["curve", "--g2-list", "1,0.9", "--n-max", "5", "--approx"]);
    assert!(text.lines().nth(1).unwrap().ends_with(",V_approx"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 8);
    for r in &rows[..4] {
        assert!(r[2..].iter().all(|x| x.parse::<f64>().unwrap() == 0.0));
    }
    let n2: Vec<f64> = rows[4].iter().map(|x| x.parse().unwrap()).collect();
    assert!((n2[2] - 0.005).abs() < 1e-15);
    assert!((n2[5] - n2[4].powi(3)).abs() < 1e-15);
}

#[test]
fn budget_scaling() {
    let b20 = json(&["budget", "--n", "20", "--epsilon", "0.1", "--delta", "0.1"]);
    let b80 = json(&["budget", "--n", "80", "--epsilon", "0.1", "--delta", "0.1"]);
    let l20 = b20["result"]["leading_order"].as_f64().unwrap();
    assert!((l20 - 6.1237e-4).abs() < 1e-7);
    let l80 = b80["result"]["leading_order"].as_f64().unwrap();
    assert!((l80 / l20 - 0.125).abs() < 1e-14);
    assert!(b20["result"]["refined"].as_f64().unwrap() >= l20);
}

#[test]
fn budget_rejects_delta_one() {
    assert_eq!(
        run(&["budget", "--n", "20", "--epsilon", "0.1", "--delta", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn variance_report() {
    let v = json(&[
        "variance",
        "--g2",
        "0.9",
        "--n",
        "2",
        "--epsilon",
        "0.5",
        "--delta",
        "0.1",
    ]);
    let r = &v["result"];
    assert!((r["v_exact"].as_f64().unwrap() - 0.005).abs() < 1e-15);
    assert_eq!(r["v_exact"], r["v_direct"]);
    assert_eq!(r["bound_satisfied"], true);
    assert_eq!(run(&["variance", "--n", "3", "--delta", "0.1"]).status.code(), Some(2));
}

#[test]
fn verify_bundled_config() {
    let v = json(&["verify", "--config", bundled("verify-small.json").to_str().unwrap()]);
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["config"]["seed"], 20240611);
    assert_eq!(v["config"]["source"]["g2"].as_f64(), Some(0.9));
}

#[test]
fn command_line_overrides_config() {
    let v = json(&[
        "verify",
        "--config",
        bundled("verify-small.json").to_str().unwrap(),
        "--samples",
        "2000",
    ]);
    assert_eq!(v["config"]["samples"], 2000);
    assert_eq!(v["result"]["attempts"][0]["samples"], 2000);
}

#[test]
fn verify_ideal_short_circuits() {
    let v = json(&["verify", "--n", "3", "--m", "20", "--samples", "1000"]);
    assert_eq!(v["result"]["passed"], true);
    assert!(v["result"]["note"].as_str().unwrap().contains("ideal"));
}

#[test]
fn verify_rejects_few_samples() {
    assert_eq!(
        run(&["verify", "--n", "2", "--m", "16", "--g2", "0.9", "--samples", "10"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn birthday_single_photon_and_sorting() {
    let rows = csv_rows(&ok(&["birthday", "--n", "1", "--haar-samples", "20"]));
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
    let rows = csv_rows(&ok(&[
        "birthday",
        "--n",
        "2",
        "--m-list",
        "40,10,20",
        "--haar-samples",
        "50",
    ]));
    let ms: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ms, ["10", "20", "40"]);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = [
        "birthday",
        "--n",
        "2",
        "--m-list",
        "8,16",
        "--haar-samples",
        "100",
        "--g2",
        "0.9",
    ];
    let one = run(&[&["--threads", "1"], &args[..]].concat());
    let many = run(&[&["--threads", "4"], &args[..]].concat());
    let default = run(&args);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stdout, default.stdout);
    let v = ["verify", "--n", "2", "--m", "10", "--g2", "0.8", "--samples", "3000"];
    assert_eq!(
        run(&[&["--threads", "1"], &v[..]].concat()).stdout,
        run(&[&["--threads", "3"], &v[..]].concat()).stdout
    );
}

#[test]
fn output_file_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let printed = ok(&["gk", "--n", "3", "--g2", "0.9"]);
    assert!(ok(&["gk", "--n", "3", "--g2", "0.9", "-o", path.to_str().unwrap()]).is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), printed);
}

#[test]
fn help_and_usage_errors() {
    let help = ok(&["verify", "--help"]);
    for flag in ["--samples", "--seed", "--epsilon", "--g2", "--config", "--threads"] {
        assert!(help.contains(flag), "missing {flag}");
    }
    assert_eq!(run(&["gk", "--n", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["gk", "--n", "3", "--g2", "0.9", "--rho-file", "x.json"])
            .status
            .code(),
        Some(2)
    );
}
