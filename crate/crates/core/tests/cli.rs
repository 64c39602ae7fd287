use std::process::{Command, Output};

use stein_approx::bounds::BoundReport;
use stein_approx::cli::Certificate;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stein-approx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn poisson_bound_for_negative_binomials() {
    let out = run(&[
        "bound", "--target", "poisson", "--comp", "nb:5:0.9", "--count", "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("value: 0.1111"));
}

#[test]
fn poisson_components_give_zero() {
    let out = run(&[
        "bound", "--target", "poisson", "--comp", "po:2", "--count", "3", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = BoundReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.value, 0.0);
}

#[test]
fn under_dispersion_is_a_precondition_failure() {
    let out = run(&[
        "bound", "--target", "pg", "--comp", "ber:0.1", "--count", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("under-dispersion"), "{text}");
    assert!(text.contains("sigma^2 > mu"));
}

#[test]
fn invalid_component_is_a_usage_error() {
    let out = run(&["bound", "--comp", "nb:-1:0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--comp"));
    let out = run(&["bound"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_round_trip_is_byte_identical() {
    for target in ["poisson", "pg"] {
        let out = run(&[
            "bound", "--target", target, "--comp", "nb:5:0.9", "--count", "10", "--format", "json",
        ]);
        let text = stdout(&out);
        let report = BoundReport::from_json(&text).unwrap();
        assert_eq!(format!("{}\n", report.to_json()), text);
    }
    // Failed preconditions carry an infinite value, emitted as null.
    let out = run(&[
        "bound", "--target", "pg", "--comp", "ge:0.5", "--format", "json",
    ]);
    let text = stdout(&out);
    assert!(text.contains("\"value\": null"));
    let report = BoundReport::from_json(&text).unwrap();
    assert!(report.value.is_infinite());
    assert_eq!(format!("{}\n", report.to_json()), text);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = run(&[
        "bound",
        "--comp",
        "nb:5:0.9",
        "--count",
        "10",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theorem,value,uncertainty,valid"));
    assert!(lines.next().unwrap().starts_with("poisson,"));
    assert!(lines.next().unwrap().starts_with("poisson-geometric,"));
}

#[test]
fn table1_is_deterministic_and_matches() {
    let a = run(&["table1", "--format", "csv"]);
    let b = run(&["table1", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("n,q,poisson,vellaisamy_upadhye\n"));
    assert!(text.contains("10,0.1,0.1111,0.3370"));
    assert!(text.contains("30,0.2,0.2500,3.2166"));
    assert!(text.contains("50,0.1,0.1111,1.6848"));
}

#[test]
fn table1_total_lambda_reading_differs() {
    let out = run(&["table1", "--format", "csv", "--vu-lambda", "total"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!stdout(&out).contains("0.3370"));
}

#[test]
fn two_runs_report() {
    let out = run(&["two-runs", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("mu = 2.000000"));
    assert!(text.contains("0.18750000"));
    assert!(text.contains("PASS"));

    let out = run(&["two-runs", "--p", "0.5", "--n", "5"]);
    let text = stdout(&out);
    assert!(text.contains("mu = 10.000000"));
    assert!(text.contains("poisson bound = 1.0000"));
}

#[test]
fn two_runs_rejects_bad_p() {
    assert_eq!(run(&["two-runs", "--p", "1.5"]).status.code(), Some(2));
    let out = run(&["two-runs", "--p", "0.7"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("index 4"));
}

#[test]
fn certify_bernoulli_sum() {
    let out = run(&[
        "certify", "--comp", "ber:0.1", "--count", "10", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let cert: Certificate = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(cert.pass);
    assert!((cert.bound.value - 0.1).abs() < 1e-12);
    assert!(cert.exact > 0.0 && cert.exact < 0.1);
}

#[test]
fn certify_pg_exact_law() {
    let out = run(&[
        "certify", "--target", "pg", "--comp", "po:3", "--comp", "ge:0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn certify_geometric_sum_reports_ratio() {
    let out = run(&["certify", "--comp", "ge:0.5", "--count", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("ratio bound/exact:"));
    assert!(text.contains("PASS"));
}

#[test]
fn certify_never_passes_a_corrupted_bound() {
    for inject in ["0", "0.01", "0.1"] {
        let out = run(&[
            "certify",
            "--comp",
            "ge:0.5",
            "--count",
            "5",
            "--inject-bound",
            inject,
        ]);
        assert_eq!(out.status.code(), Some(4), "inject {inject}");
        assert!(stdout(&out).contains("FAIL"));
    }
}

#[test]
fn certify_refuses_over_budget() {
    let out = run(&[
        "certify", "--comp", "nb:5:0.5", "--count", "50", "--budget", "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("try at most"));
}

#[test]
fn figures_write_six_panels() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["figures", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for n in [10, 30, 50] {
        for q in ["0.1", "0.2"] {
            let csv =
                std::fs::read_to_string(dir.path().join(format!("panel_n{n}_q{q}.csv"))).unwrap();
            assert!(csv.starts_with("j,pmf_exact,pmf_approx\n"));
        }
    }
}
