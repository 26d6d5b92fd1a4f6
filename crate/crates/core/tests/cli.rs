use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_binomial-bell");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

// values computed independently with printf-style %.12g
const FIG1_GOLDEN: &str = "\
G,theta2p,S_B
0,0,0
0,1.57079632679,0
0,3.14159265359,0
0.5,0,0.5
0.5,1.57079632679,1.20710678119
0.5,3.14159265359,1.20710678119
1,0,1
1,1.57079632679,2.41421356237
1,3.14159265359,2.41421356237
";

#[test]
fn fig1_matches_golden_file() {
    let out = run(&["fig1", "--grid-degree", "0:1:3", "--grid-theta2p", "0:pi:3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), FIG1_GOLDEN);
}

#[test]
fn csv_output_is_byte_stable() {
    let args = [
        "observables",
        "--order",
        "2",
        "--grid-eta",
        "-1:2:4",
        "--grid-p1",
        "0:1:3",
        "--p2",
        "0.3",
        "--grid-phi1",
        "0:pi:3",
        "--phi2",
        "pi/4",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 4 * 3 * 3);
    assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 12));
    assert!(!text.contains("-0,"));
}

#[test]
fn fig1_writes_files_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("surface.csv");
    let summary = dir.path().join("summary.json");
    let out = run(&[
        "fig1",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().count(), 1 + 101 * 201);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["max"]["G"], 1.0);
    assert!((doc["max"]["S_B"].as_f64().unwrap() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    let threshold = doc["threshold_G"].as_f64().unwrap();
    assert!((threshold - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.01);
    let first = doc["first_violating_G"].as_f64().unwrap();
    assert!(
        first > std::f64::consts::FRAC_1_SQRT_2 && first - 0.01 <= std::f64::consts::FRAC_1_SQRT_2
    );
}

#[test]
fn state_dumps() {
    let out = run(&[
        "state", "--kind", "ngbs", "--n", "2", "--p", "0.5", "--phi", "0", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "label,re,im,probability\n|0⟩,0.5,0,0.25\n|1⟩,0.707106781187,0,0.5\n|2⟩,0.5,0,0.25\n"
    );

    let doc = json(&run(&["state", "--eta", "0"]));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["product_state"], true);
    assert!((doc["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let doc = json(&run(&["state", "--order", "2", "--p1", "1", "--p2", "1"]));
    assert_eq!(doc["product_state"], false);
    let support: Vec<&str> = doc["amplitudes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["probability"].as_f64().unwrap() > 1e-15)
        .map(|a| a["label"].as_str().unwrap())
        .collect();
    assert_eq!(support, ["|0,2⟩", "|2,0⟩"]);
    let means = doc["mean_photons"].as_array().unwrap();
    assert!((means[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn observable_examples() {
    let row = |order: &str, eta: &str| {
        let out = run(&[
            "observables",
            "--order",
            order,
            "--eta",
            eta,
            "--p1",
            "0.5",
            "--p2",
            "0.5",
            "--phi1",
            "0",
            "--phi2",
            "0",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        let line = text.lines().nth(1).unwrap().to_string();
        line.split(',')
            .map(|x| x.parse::<f64>().unwrap())
            .collect::<Vec<f64>>()
    };
    let one = row("1", "1");
    assert!((one[9] + 4.0).abs() < 1e-10 && (one[10] + 4.0).abs() < 1e-10);
    let two = row("2", "1");
    let expected = -2.0 * (3.0 + 2.0 * std::f64::consts::SQRT_2);
    assert!((two[9] - expected).abs() < 1e-10 && (two[10] - expected).abs() < 1e-10);
    let zero = row("2", "0");
    assert_eq!((zero[9], zero[10]), (0.0, 0.0));
}

#[test]
fn bell_mc_verdicts() {
    let doc = json(&run(&["bell-mc", "--shots", "200000", "--seed", "3"]));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["violation"], true);
    let report = &doc["report"];
    assert_eq!(report["settings"].as_array().unwrap().len(), 4);
    assert!(report["rng"].as_str().unwrap().contains("ChaCha8"));
    let sb = report["sb_estimate"].as_f64().unwrap();
    let se = report["sb_std_error"].as_f64().unwrap();
    assert!((sb - 2.0 * std::f64::consts::SQRT_2).abs() < 3.0 * se);

    for (alpha, free) in [("0.82", false), ("0.9", true)] {
        let doc = json(&run(&["bell-mc", "--alpha", alpha, "--shots", "2000"]));
        assert_eq!(doc["loophole_free_at_alpha"], free, "alpha {alpha}");
        assert!((doc["alpha_threshold"].as_f64().unwrap() - 0.828427).abs() < 1e-6);
    }

    let doc = json(&run(&["bell-mc", "--eta", "0", "--shots", "2000"]));
    assert_eq!(doc["alpha_threshold"], Value::Null);
    assert_eq!(doc["violation"], false);
    assert_eq!(doc["loophole_free_at_alpha"], false);

    let doc = json(&run(&[
        "bell-mc",
        "--degree",
        "1",
        "--angles",
        "0,pi/4,pi/2,3pi/4",
        "--shots",
        "100",
    ]));
    assert_eq!(doc["report"]["config"]["state"]["eta"], 1.0);
}

#[test]
fn bell_mc_is_reproducible() {
    let args = [
        "bell-mc", "--alpha", "0.7", "--shots", "5000", "--seed", "42",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn verify_reports_corrections() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["corrections"]["mean_field_denominator"], true);
    assert_eq!(doc["corrections"]["covariance_interference_sign"], true);
    assert!(doc["suites"].as_array().unwrap().len() >= 5);
}

#[test]
fn exit_codes() {
    let invalid: [&[&str]; 8] = [
        &["bell-mc", "--alpha", "0"],
        &["bell-mc", "--alpha", "1.5"],
        &["bell-mc", "--shots", "0"],
        &["state", "--p1", "1.2"],
        &["state", "--order", "3"],
        &["fig1", "--grid-degree", "0:1:0"],
        &["observables", "--format", "xml"],
        &["frobnicate"],
    ];
    for args in invalid {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(
        run(&["bell-mc", "--eta", "1", "--degree", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn reconciliation_failure_exits_with_two() {
    let base = [
        "observables",
        "--order",
        "2",
        "--eta",
        "0.5",
        "--p1",
        "0.3",
        "--p2",
        "0.6",
        "--epsilon",
        "2.5",
    ];
    assert_eq!(run(&base).status.code(), Some(0));
    let mut uncorrected = base.to_vec();
    uncorrected.push("--uncorrected");
    let out = run(&uncorrected);
    assert_eq!(out.status.code(), Some(2));
    let row: Vec<f64> = stdout(&out)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!(row[11] > 1e-8);
    // order 1 has no alternative forms
    let out = run(&[
        "observables",
        "--order",
        "1",
        "--eta",
        "0.5",
        "--p1",
        "0.3",
        "--uncorrected",
    ]);
    assert_eq!(out.status.code(), Some(0));
}
