use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assocfree"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const DIHEDRAL: [&str; 4] = ["--closure", "dihedral", "--totally-ramified", "true"];

#[test]
fn verdict_for_thirteen_is_not_free() {
    let out = run(&[
        &["verdict", "--p", "13", "--e", "2", "--t", "3"][..],
        &DIHEDRAL,
    ]
    .concat());
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["free"], false);
    assert_eq!(v["cf_length"], 5);
    assert_eq!(v["E"], serde_json::json!([1, 2, 5]));
}

#[test]
fn maximal_verdict_omits_profile_fields() {
    let out = run(&[
        &["verdict", "--p", "5", "--e", "2", "--t", "5"][..],
        &DIHEDRAL,
    ]
    .concat());
    let v = json(&out);
    assert_eq!(v["free"], true);
    assert_eq!(v["case"], "maximal_a0");
    for key in ["nu", "n", "E", "scaffold_c", "scaffold_l"] {
        assert!(v.get(key).is_none(), "{key} should be omitted");
    }
}

#[test]
fn even_jump_is_a_validation_error() {
    let out = run(&[
        &["verdict", "--p", "7", "--e", "1", "--t", "2"][..],
        &DIHEDRAL,
    ]
    .concat());
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "ParityViolation");
}

#[test]
fn cyclic_and_nontot_verdicts() {
    let v = json(&run(&[
        "verdict",
        "--p",
        "13",
        "--e",
        "4",
        "--t",
        "3",
        "--closure",
        "cyclic",
    ]));
    assert_eq!(v["free"], true);
    let v = json(&run(&[
        "verdict",
        "--p",
        "13",
        "--e",
        "12",
        "--t",
        "12",
        "--totally-ramified",
        "false",
    ]));
    assert_eq!(v["case"], "non_tot_ram_delegated");
    assert_eq!(v["free"], true);
    let out = run(&[
        "verdict",
        "--p",
        "13",
        "--e",
        "4",
        "--t",
        "3",
        "--closure",
        "cyclic",
        "--totally-ramified",
        "false",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn survey_csv_unramified_rows_are_free() {
    let out = run(&["survey", "--p-max", "7", "--e-max", "1", "--format", "csv"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header.join(","),
        "p,e,t,closure,totally_ramified,ell,a,a0,cf,cf_length,case,free,reason,scaffold_c,scaffold_l"
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| &r[11] == "true"));
}

#[test]
fn survey_json_contains_thirteen_and_is_ordered() {
    let out = run(&[
        "survey", "--p-list", "13", "--e-max", "2", "--format", "json",
    ]);
    let recs: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(recs.iter().any(|r| r["e"] == 2
        && r["t"] == 3
        && r["totally_ramified"] == true
        && r["free"] == false));
    let keys: Vec<(u64, u64, u64)> = recs
        .iter()
        .map(|r| {
            (
                r["p"].as_u64().unwrap(),
                r["e"].as_u64().unwrap(),
                r["t"].as_u64().unwrap(),
            )
        })
        .collect();
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    let again = run(&[
        "survey", "--p-list", "13", "--e-max", "2", "--format", "json",
    ]);
    assert_eq!(out.stdout, again.stdout);
    let reparsed: Vec<Value> =
        serde_json::from_str(&serde_json::to_string(&recs).unwrap()).unwrap();
    assert_eq!(reparsed, recs);
}

#[test]
fn empty_survey_and_unwritable_output() {
    let out = run(&["survey", "--p-list", "3", "--e-max", "0", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    let out = run(&[
        "survey",
        "--p-list",
        "13",
        "--e-max",
        "1",
        "--out",
        "/nonexistent-dir/x.json",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn survey_writes_to_file() {
    let dir = std::env::temp_dir().join(format!("assocfree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s.json");
    let out = run(&[
        "survey",
        "--p-list",
        "5",
        "--e-max",
        "1",
        "--closure",
        "all",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let recs: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(recs.iter().any(|r| r["closure"] == "cyclic"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_suites() {
    let out = run(&["verify", "--suite", "groupring", "--max-p", "13"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let out = run(&[
        "verify", "--suite", "patterns", "--max-p", "50", "--format", "json",
    ]);
    assert!(out.status.success());
    let checks: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert_eq!(run(&["verify", "--suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn cf_and_order_subcommands() {
    let v = json(&run(&["cf", "--x", "8", "--p", "13"]));
    assert_eq!(v["cf"], serde_json::json!([0, 1, 1, 1, 1, 2]));
    assert_eq!(v["E"], serde_json::json!([1, 2, 5]));
    let v = json(&run(&[
        &["order", "--p", "13", "--e", "2", "--t", "3"][..],
        &DIHEDRAL,
    ]
    .concat()));
    assert_eq!(v["orders_equal"], false);
    assert_eq!(v["band"], "HighBand");
    assert_eq!(v["ring"]["cond1"], false);
    assert_eq!(run(&["cf", "--x", "1", "--p", "9"]).status.code(), Some(2));
}
