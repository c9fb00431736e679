use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cotverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cotverify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = cotverify(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dim_reads_a_class_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("indicator4.json");
    let out = cotverify(&["families", "indicator4", "--out", path(&file)]);
    assert!(out.status.success());
    let v = json(&["dim", "--class", path(&file), "--kind", "sc", "--k", "0"]);
    assert_eq!(v["value"], "1/1");
    assert!(v["witness"].is_object());
    let v = json(&[
        "dim",
        "--class",
        path(&file),
        "--kind",
        "ldim",
        "--no-witness",
    ]);
    assert_eq!(v["value"], "1/1");
    assert!(v.get("witness").is_none_or(Value::is_null));
}

#[test]
fn family_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(cotverify(&["families", "complement4x2", "--out", path(&a)])
        .status
        .success());
    let direct = json(&[
        "dim",
        "--class",
        "complement4x2",
        "--kind",
        "sc",
        "--k",
        "0",
        "--no-witness",
    ]);
    let from_file = json(&[
        "dim",
        "--class",
        path(&a),
        "--kind",
        "sc",
        "--k",
        "0",
        "--no-witness",
    ]);
    assert_eq!(direct["value"], "3/1");
    assert_eq!(direct["value"], from_file["value"]);
    assert!(cotverify(&[
        "families",
        "complement4x2",
        "--fail-token",
        "--out",
        path(&b)
    ])
    .status
    .success());
    let text = std::fs::read_to_string(&b).unwrap();
    assert!(text.contains("fail_token"));
}

#[test]
fn tree_duels_are_tight() {
    for (class, learner, extra) in [
        ("complement4x2", "sc-soa", vec!["--k", "0"]),
        ("bitstring2", "sc-soa", vec!["--k", "1"]),
        ("product2x3", "wsc-soa", vec!["--gamma-s", "2"]),
        ("conjunction2", "scl-soa", vec![]),
    ] {
        let mut args = vec![
            "duel",
            "--class",
            class,
            "--learner",
            learner,
            "--adversary",
            "tree",
        ];
        args.extend(extra);
        let v = json(&args);
        assert_eq!(v["verdict"], "tight", "{class} {learner}");
        assert_eq!(v["cost"], v["lower_bound"]);
    }
}

#[test]
fn named_adversaries() {
    let v = json(&[
        "duel",
        "--class",
        "bitstring4",
        "--learner",
        "majority",
        "--adversary",
        "bitstring",
    ]);
    let forced = v["transcript"]["rounds"].as_array().unwrap().len();
    assert!(forced >= 2);
    let v = json(&[
        "duel",
        "--class",
        "complement5x3",
        "--learner",
        "sound-conservative",
        "--adversary",
        "complement",
    ]);
    assert_eq!(v["transcript"]["totals"]["completeness"], 4);
    assert_eq!(v["transcript"]["totals"]["soundness"], 0);
}

#[test]
fn bad_arguments_exit_with_two() {
    assert_eq!(cotverify(&["dim", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        cotverify(&["dim", "--class", "nosuch", "--kind", "sc"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cotverify(&[
            "run",
            "--class",
            "bitstring2",
            "--learner",
            "majority",
            "--via-prefix",
            "--target",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn repeated_runs_are_identical() {
    let args = [
        "run",
        "--class",
        "complement5x3",
        "--learner",
        "sc-soa",
        "--k",
        "1",
        "--target",
        "2",
        "--random",
        "30",
        "--seed",
        "9",
    ];
    let a = cotverify(&args);
    let b = cotverify(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let boost = [
        "boost",
        "--runs",
        "2",
        "--trials",
        "40",
        "--seed",
        "5",
        "--threads",
        "1",
    ];
    assert_eq!(cotverify(&boost).stdout, cotverify(&boost).stdout);
}

#[test]
fn reductions_from_the_command_line() {
    let v = json(&[
        "run",
        "--class",
        "complement4x2",
        "--learner",
        "sc-soa",
        "--k",
        "0",
        "--target",
        "1",
        "--via-prefix",
        "--random",
        "20",
        "--seed",
        "1",
    ]);
    assert_eq!(v["transcript"]["totals"]["soundness"], 0);
    let c = v["transcript"]["totals"]["completeness"].as_u64().unwrap();
    assert!(c <= 3);
    let v = json(&[
        "run",
        "--class",
        "bitstring2+F",
        "--learner",
        "majority",
        "--target",
        "3",
        "--via-cot",
        "--random",
        "20",
        "--seed",
        "1",
    ]);
    assert!(v["transcript"]["inner"].is_object());
}

#[test]
fn boost_summary_and_goodness() {
    let v = json(&["boost", "--runs", "3", "--trials", "60", "--summary"]);
    assert_eq!(v["m_s"], 0);
    assert_eq!(v["m_c"], 3);
    assert_eq!(v["s1"], 139);
    assert_eq!(v["call_budget_per_example"], 92);
    assert_eq!(v["max_incorrect_proof"], "0/1");
    assert_eq!(v["per_run"].as_array().unwrap().len(), 0);
    let v = json(&["boost", "verify-alpha"]);
    assert_eq!(v["gamma"], "3/4");
    assert_eq!(v["declared_good_verified"], true);
}

#[test]
fn scenario_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("scenario.json");
    assert!(cotverify(&["boost", "standard", "--out", path(&file)])
        .status
        .success());
    let a = json(&[
        "boost",
        "--scenario",
        path(&file),
        "--runs",
        "2",
        "--trials",
        "30",
        "--summary",
    ]);
    let b = json(&["boost", "--runs", "2", "--trials", "30", "--summary"]);
    assert_eq!(a, b);
}
