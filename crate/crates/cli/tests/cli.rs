//! End-to-end tests of the `huffmax` binary: output contracts, exit
//! codes, and the export/verify round trip.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_huffmax"))
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn classify_json_matches_contract() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "p.pmf", "3/10\n3/10\n1/5\n1/5\n");
    let out = bin()
        .args(["classify", &pmf, "--arity", "2", "--format", "json"])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["is_max"], serde_json::json!(true));
    assert_eq!(json["branch"], serde_json::json!("PowerOfD"));
    assert_eq!(json["lowest_d_sum"], serde_json::json!("2/5"));
    assert_eq!(json["highest"], serde_json::json!("3/10"));
    assert_eq!(json["max_value"], serde_json::json!("2"));
}

#[test]
fn classify_rejects_non_maximum() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "p.pmf", "2/5\n3/10\n1/5\n1/10\n");
    let out = bin()
        .args(["classify", &pmf, "--format", "json"])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["is_max"], serde_json::json!(false));
}

#[test]
fn tree_emits_known_codeword_set() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "u6.pmf", &"1/6\n".repeat(6));
    let out = bin()
        .args(["tree", &pmf, "--arity", "2", "--alphabet", "01", "--format", "json"])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["expected_length"], serde_json::json!("8/3"));
    let mut words: Vec<String> = json["symbols"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["codeword"].as_str().unwrap().to_string())
        .collect();
    words.sort();
    assert_eq!(words, vec!["00", "01", "100", "101", "110", "111"]);
}

#[test]
fn tree_reports_symbols_in_input_order() {
    let dir = tempfile::tempdir().unwrap();
    // smallest first: sorting must not lose the input identities
    let pmf = write(dir.path(), "p.pmf", "1/8\n1/8\n1/4\n1/2\n");
    let out = bin()
        .args(["tree", &pmf, "--format", "json"])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let symbols = json["symbols"].as_array().unwrap();
    assert_eq!(symbols[0]["probability"], serde_json::json!("1/8"));
    assert_eq!(symbols[0]["length"], serde_json::json!(3));
    assert_eq!(symbols[3]["probability"], serde_json::json!("1/2"));
    assert_eq!(symbols[3]["length"], serde_json::json!(1));
}

#[test]
fn lu_prints_space_separated_lengths() {
    let out = bin()
        .args(["lu", "--n", "9", "--arity", "3"])
        .output()
        .unwrap();
    assert_eq!(stdout_of(&out), "2 2 2 2 2 2 2 2 2\n");
}

#[test]
fn export_dot_verify_round_trip_passes() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "p.pmf", "2/5\n3/10\n1/5\n1/10\n");
    let dot_path = dir.path().join("tree.dot");
    let out = bin()
        .args(["export-dot", &pmf, "--arity", "3"])
        .args(["--out", dot_path.to_str().unwrap()])
        .output()
        .unwrap();
    stdout_of(&out);

    let verify = bin()
        .args(["verify", &pmf, "--tree", dot_path.to_str().unwrap()])
        .output()
        .unwrap();
    let text = stdout_of(&verify);
    assert!(text.contains("level property: PASS"), "{text}");
    assert!(text.contains("huffman tree: yes"), "{text}");
}

#[test]
fn verify_arity_conflict_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "p.pmf", "2/5\n3/10\n1/5\n1/10\n");
    let dot_path = dir.path().join("tree.dot");
    bin()
        .args(["export-dot", &pmf, "--arity", "3"])
        .args(["--out", dot_path.to_str().unwrap()])
        .output()
        .unwrap();
    let verify = bin()
        .args(["verify", &pmf, "--tree", dot_path.to_str().unwrap(), "--arity", "2"])
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&verify.stderr).contains("ArityMismatch"));
}

#[test]
fn oracle_agrees_with_engine() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "p.pmf", "1/2\n1/4\n1/8\n1/8\n");
    let out = bin()
        .args(["oracle", &pmf, "--format", "json"])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["oracle_value"], serde_json::json!("7/4"));
    assert_eq!(json["agreement"], serde_json::json!(true));
    assert_eq!(json["oracle_lengths"], serde_json::json!([1, 2, 3, 3]));
}

#[test]
fn sweep_writes_csv_and_reports_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let out = bin()
        .args(["sweep", "--n", "4", "--denominator", "12", "--arity", "2"])
        .args(["--out", csv_path.to_str().unwrap(), "--format", "json"])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["classifier_agreement"], serde_json::json!(true));
    assert_eq!(json["max_value"], serde_json::json!("2"));

    let csv = fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.trim_end().lines().collect();
    assert_eq!(lines[0], "p1,p2,p3,p4,value,classifier_is_max,oracle_is_argmax");
    assert_eq!(lines.len() - 1, json["point_count"].as_u64().unwrap() as usize);
}

#[test]
fn normalize_rescales_integer_masses() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "masses.pmf", "3\n2\n1\n");
    let fail = bin().args(["tree", &pmf]).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stderr).contains("SumNotOne"));

    let ok = bin()
        .args(["tree", &pmf, "--normalize", "--format", "json"])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&ok)).unwrap();
    assert_eq!(json["expected_length"], serde_json::json!("3/2"));
}

#[test]
fn domain_and_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.pmf", "1/2\n1/3\n");
    let run = bin().args(["classify", &bad]).output().unwrap();
    assert_eq!(run.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("SumNotOne"), "{stderr}");
    assert!(stderr.contains("1/6"), "deficit missing: {stderr}");

    let usage = bin().args(["classify", "--bogus-flag"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));

    let missing = bin().args(["classify", "/no/such/file.pmf"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn identical_inputs_give_byte_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "p.pmf", "2/5\n3/10\n1/5\n1/10\n");
    for args in [
        vec!["tree", pmf.as_str(), "--arity", "3"],
        vec!["export-dot", pmf.as_str(), "--arity", "3"],
        vec!["classify", pmf.as_str(), "--format", "json"],
    ] {
        let a = bin().args(&args).output().unwrap();
        let b = bin().args(&args).output().unwrap();
        assert_eq!(stdout_of(&a), stdout_of(&b), "args {args:?}");
    }
}
