use std::path::PathBuf;
use std::process::{Command, Output};

use tradeoff_core::elicitation::{ElicitationSession, FinalReport};
use tradeoff_core::io::{parse_attributes_json, read_plans_csv};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tradeoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tradeoff")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn frontier_of_tiny_fixture() {
    let o = tradeoff(&["frontier", "--plans", &fixture("tiny.csv")]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o), "0 1\n");
}

#[test]
fn frontier_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    let o = tradeoff(&["frontier", "--plans", &fixture("tiny.csv"), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["surviving"], serde_json::json!([0, 1]));
    assert_eq!(v["eliminated"][0]["dominator"], 1);
}

#[test]
fn simulate_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    for (kind, ext) in [("first-merge", "json"), ("anytime", "json"), ("anytime", "csv")] {
        let (a, b) = (path(&format!("a.{ext}")), path(&format!("b.{ext}")));
        for out in [&a, &b] {
            let o = tradeoff(&["simulate", kind, "--m", "50", "--n", "6", "--trials", "60", "--seed", "42", "--out", out]);
            assert!(o.status.success(), "{o:?}");
        }
        let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        assert!(!a.is_empty());
        assert_eq!(a, b, "{kind} {ext}");
    }
    let csv = std::fs::read_to_string(path("a.csv")).unwrap();
    assert!(csv.starts_with("merge_count,strategy,mean_frontier_size,trials\n"));
}

#[test]
fn pooled_simulation_to_stdout() {
    let o = tradeoff(&["simulate", "first-merge", "--trials", "20", "--seed", "7"]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 20);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["simulate", "anytime", "--m", "0", "--n", "6"][..],
        &["simulate", "anytime", "--m", "10", "--n", "1"],
        &["simulate", "first-merge", "--m", "10"],
        &["simulate", "first-merge", "--trials", "0"],
        &["simulate", "first-merge", "--seed", "-1"],
        &["frontier"],
        &["frontier", "--plans", "x.csv", "--unknown", "1"],
        &["frontier", "--plans", "x.csv", "--epsilon", "-0.1"],
        &["nonsense"],
    ] {
        let o = tradeoff(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn runtime_errors_exit_1() {
    let o = tradeoff(&["frontier", "--plans", "/no/such/file.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let o = tradeoff(&["elicit", "--plans", &fixture("tiny.csv"), "--attrs", &fixture("dvt_attrs.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension mismatch"));
}

#[test]
fn elicit_script_replays() {
    let o = tradeoff(&[
        "elicit",
        "--plans",
        &fixture("tiny.csv"),
        "--attrs",
        &fixture("tiny_attrs.json"),
        "--script",
        &fixture("tiny_answers.json"),
    ]);
    assert!(o.status.success(), "{o:?}");
    let report: FinalReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.surviving, vec![0]);
    let weights = report.weights.clone().unwrap();
    assert!((weights["A"] - 0.5).abs() < 1e-12);
    assert!((weights["B"] - 0.3).abs() < 1e-12);
    assert!((weights["C"] - 0.2).abs() < 1e-12);

    // Feeding the reported answers back gives the same report.
    let table = read_plans_csv(std::fs::read(fixture("tiny.csv")).unwrap().as_slice()).unwrap();
    let attrs = parse_attributes_json(&std::fs::read_to_string(fixture("tiny_attrs.json")).unwrap()).unwrap();
    let mut again = ElicitationSession::replay(table.plans, attrs, 0.0, &report.answers).unwrap();
    assert_eq!(again.accept(), report);

    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("answers.json");
    std::fs::write(&script, serde_json::to_string(&report.answers).unwrap()).unwrap();
    let o2 = tradeoff(&[
        "elicit",
        "--plans",
        &fixture("tiny.csv"),
        "--attrs",
        &fixture("tiny_attrs.json"),
        "--script",
        script.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o2), stdout(&o));
}

#[test]
fn elicit_interactive_from_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_tradeoff"))
        .args(["elicit", "--plans", &fixture("dvt_plans.csv"), "--attrs", &fixture("dvt_attrs.json")])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"0.01\n0.02\naccept\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success(), "{o:?}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("For what probability p are you indifferent"));
    let report: FinalReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.history[0].ratio, 0.5);
}
