use std::process::{Command, Output};

fn rw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rw"))
        .args(args)
        .output()
        .expect("rw runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn leading_value(o: &Output) -> f64 {
    let text = stdout(o);
    let (_, rest) = text.split_once("= ").expect("value printed");
    rest.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn werner_weight_from_the_command_line() {
    let o = rw(&[
        "measure",
        "--state",
        "werner:d=3,alpha=0.25",
        "--measure",
        "cw",
    ]);
    assert!(o.status.success(), "{o:?}");
    assert!((leading_value(&o) - 0.25).abs() < 1e-6);
}

#[test]
fn asymmetry_needs_a_representation() {
    let o = rw(&["measure", "--state", "basis:d=4,k=1", "--measure", "aw"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rw(&[
        "measure",
        "--state",
        "basis:d=4,k=1",
        "--measure",
        "aw",
        "--rep",
        "swap:2",
    ]);
    assert!(o.status.success());
    assert!((leading_value(&o) - 1.0).abs() < 1e-6);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["measure", "--state", "werner:d=3", "--measure", "cw"][..],
        &[
            "measure",
            "--state",
            "werner:d=2,alpha=0.5",
            "--measure",
            "nope",
        ],
        &[
            "measure",
            "--state",
            "werner:d=2,alpha=0.5",
            "--measure",
            "cl1",
            "--rep",
            "swap:2",
        ],
        &["experiment", "--name", "scatter", "--dim", "1"],
        &["frobnicate"],
    ] {
        assert_eq!(rw(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn json_report_carries_certificates() {
    let o = rw(&[
        "measure",
        "--state",
        "gisin:lambda=0.5,theta=0.7",
        "--measure",
        "cr",
        "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["measure"], "cr");
    assert!(v["witness"].is_object());
    assert!(v["free_state"].is_object());
}

#[test]
fn bits_only_rescale_entropies() {
    let nats = leading_value(&rw(&[
        "measure",
        "--state",
        "max-coherent:d=4",
        "--measure",
        "crel",
    ]));
    let bits = leading_value(&rw(&[
        "measure",
        "--state",
        "max-coherent:d=4",
        "--measure",
        "crel",
        "--bits",
    ]));
    assert!((nats - 4f64.ln()).abs() < 1e-9);
    assert!((bits - 2.0).abs() < 1e-9);
    let l1 = leading_value(&rw(&[
        "measure",
        "--state",
        "max-coherent:d=4",
        "--measure",
        "cl1",
        "--bits",
    ]));
    assert!((l1 - 3.0).abs() < 1e-9);
}

#[test]
fn trace_file_has_one_json_line_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.jsonl");
    let o = rw(&[
        "measure",
        "--state",
        "haar-mixed:d=3,denv=3,seed=5",
        "--measure",
        "cw",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() > 1);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["gap"].is_number());
    }
}

#[test]
fn state_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let rho = resource_weight::states::werner(2, 0.75).unwrap();
    std::fs::write(&path, serde_json::to_string(&rho).unwrap()).unwrap();
    let spec = format!("file:{}", path.display());
    let o = rw(&["measure", "--state", &spec, "--measure", "cw"]);
    assert!(o.status.success(), "{o:?}");
    assert!((leading_value(&o) - 0.75).abs() < 1e-6);
}

#[test]
fn experiment_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = rw(&[
            "experiment",
            "--name",
            "scatter",
            "--samples",
            "40",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{o:?}");
        std::fs::read_to_string(path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("# rw-csv v1 scatter"));
    assert_eq!(lines.next(), Some(resource_weight::harness::SCATTER_HEADER));
    assert_eq!(lines.count(), 40);
}

#[test]
fn closed_forms_experiment_passes() {
    let o = rw(&["experiment", "--name", "closed-forms"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert!(text.starts_with("# rw-csv v1 closed-forms"));
    assert!(!text.contains(",false"));
}

#[test]
fn pure_violation_search_writes_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let o = rw(&[
        "experiment",
        "--name",
        "violation",
        "--samples",
        "30",
        "--env-dim",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    assert!(dir.path().join("v.csv.delta_w.hist.csv").exists());
    assert!(dir.path().join("v.csv.delta_r.hist.csv").exists());
}
