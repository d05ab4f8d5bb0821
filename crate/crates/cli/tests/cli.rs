use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qrap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrap")).args(args).output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn analyze_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "f.json", r#"{"kind":"ap","a":[0,0],"b":[1,2],"s":1}"#);
    let o = qrap(&["analyze", "--spec", &spec]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["alpha"], 2);
    assert_eq!(v["e"], 1);
    assert_eq!(v["branch"], "thm61_ii_c");
}

#[test]
fn malformed_spec_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.json", "{\"kind\":\"ap\",\n \"a\":[0], \"b\":[1], \"sz\":2}");
    let o = qrap(&["analyze", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("`sz`"), "{err}");
}

#[test]
fn missing_spec_file_exits_2() {
    let o = qrap(&["analyze", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn clap_usage_error_exits_2() {
    let o = qrap(&["count", "--pmin", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn range_above_cap_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "f.json", r#"{"kind":"shift","Z":[0,1]}"#);
    let ok = qrap(&["--prime-cap", "1000", "count", "--spec", &spec, "--pmin", "3", "--pmax", "1000", "--eps", "+1"]);
    assert!(ok.status.success());
    let o = qrap(&["--prime-cap", "1000", "count", "--spec", &spec, "--pmin", "3", "--pmax", "2000", "--eps", "+1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn count_matches_hand_values() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "f.json", r#"{"kind":"ap","a":[0,0],"b":[1,2],"s":1}"#);
    let o = qrap(&["count", "--spec", &spec, "--pmin", "3", "--pmax", "20", "--all", "--eps", "+1"]);
    assert!(o.status.success());
    // n and 2n both residues: only when 2 is a residue, i.e. p = ±1 mod 8.
    let expected = "p,mode,eps_or_eta,count\n3,constant_sign,+1,0\n5,constant_sign,+1,0\n7,constant_sign,+1,2\n\
                    11,constant_sign,+1,0\n13,constant_sign,+1,0\n17,constant_sign,+1,4\n19,constant_sign,+1,0\n";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn count_shift_pattern_sums_to_p() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "f.json", r#"{"kind":"shift","Z":[0,1]}"#);
    let mut total = 0u64;
    for pat in ["++", "+-", "-+", "--"] {
        let o = qrap(&["count", "--spec", &spec, "--pmin", "101", "--pmax", "101", "--all", &format!("--pattern={pat}")]);
        assert!(o.status.success());
        let text = stdout(&o);
        let row = text.lines().nth(1).unwrap();
        total += row.rsplit(',').next().unwrap().parse::<u64>().unwrap();
    }
    // The two n with a zero entry belong to no pattern.
    assert_eq!(total, 101 - 2);
}

#[test]
fn verify_assert_passes_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "f.json", r#"{"kind":"ap","a":[0,0],"b":[1,2],"s":1}"#);
    let summary = dir.path().join("summary.json");
    let o = qrap(&[
        "verify", "--spec", &spec, "--pmin", "3", "--pmax", "5000", "--all", "--eps", "-1", "--assert",
        "--summary", summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("p,count,predicted,error,bound,pass,pi_class"));
    for row in text.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        if cols[6] == "pi_minus" {
            assert_eq!(cols[1], "0", "{row}");
        }
    }
    let v: Value = serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(v["pi_minus_zero_confirmed"], true);
}

#[test]
fn weil_assert_passes() {
    let o = qrap(&["weil", "--pmin", "100", "--pmax", "400", "--shifts", "0,-1,5", "--assert"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("p,d,N,value,bound,within_bound"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn weil_rejects_repeated_roots() {
    let o = qrap(&["weil", "--pmin", "3", "--pmax", "3", "--all", "--shifts", "0,3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("g.json");
    let o = qrap(&["generate", "--d", "1", "--a1", "1", "--b1", "1", "--t", "2", "--s", "2", "--out", spec.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&spec).unwrap()).unwrap();
    assert_eq!(v["a"], serde_json::json!([1, 4]));
    assert_eq!(v["b"], serde_json::json!([1, 2]));

    let o = qrap(&["analyze", "--spec", spec.to_str().unwrap()]);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["branch"], "thm61_ii_c");
    assert_eq!(r["alpha"], 4);
    assert_eq!(r["e"], 1);
}

#[test]
fn generate_rejects_multiplier_one() {
    let o = qrap(&["generate", "--d", "1", "--a1", "1", "--b1", "1", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fixture_document_is_accepted_as_spec() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fx.json");
    let o = qrap(&["fixture", "--name", "k3_ii", "--s", "3", "--q", "1", "--r", "2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let fx: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();

    let o = qrap(&["analyze", "--spec", path.to_str().unwrap()]);
    assert!(o.status.success());
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["alpha"], fx["expected"]["alpha"]);
    assert_eq!(r["e"], fx["expected"]["e"]);
    assert_eq!(r["branch"], fx["expected"]["branch"]);
    // Exponent s + q + r.
    assert_eq!(fx["expected"]["exponent"], 6);
}

#[test]
fn fixture_inconsistent_parameters_exit_2() {
    let o = qrap(&["fixture", "--name", "k3_ii", "--s", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stats_q0_small_case() {
    let o = qrap(&["stats", "--pmax", "1000", "--q0", "plus", "--len", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "side,s,q0\nplus,2,7\n");
}

#[test]
fn output_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "f.json", r#"{"kind":"ap","a":[1,4],"b":[1,2],"s":2}"#);
    let run = |w: &str| stdout(&qrap(&["--workers", w, "verify", "--spec", &spec, "--pmin", "3", "--pmax", "20000", "--eps", "+1"]));
    assert_eq!(run("1"), run("3"));
}
