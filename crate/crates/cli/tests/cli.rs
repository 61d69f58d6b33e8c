use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

const A2: &str = r#"{"n":2,"vectors":[[1,0],[0,1],[1,1]],"multiplicities":[1,1,1]}"#;
const A2H2: &str = r#"{"n":2,"vectors":[[1,0],[0,1],[1,1]],"multiplicities":[2,2,2]}"#;
const NONUNI: &str = r#"{"n":2,"vectors":[[1,0],[0,1],[1,2]],"multiplicities":[1,1,1]}"#;
const PAIR: &str = r#"{"n":1,"vectors":[[2],[3]],"multiplicities":[1,1]}"#;
const TRIANGLE: &str = r#"{"dim":2,"normals":[[1,0],[0,1],[-1,-1]],"offsets":[0,0,3]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vpf"))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "vpf {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn unimodular_formula_prints_the_linear_term() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = write_file(dir.path(), "a2.json", A2);
    let a2 = a2.to_str().unwrap();

    let out = stdout_of(&["formula", "--system", a2, "--chamber", "c1"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["chamber"], "c1");
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["pole"], serde_json::json!(["0", "0"]));
    assert_eq!(terms[0]["poly"], "a2+1");

    let again = stdout_of(&["formula", "--system", a2, "--chamber", "c1"]);
    assert_eq!(out, again, "output must be byte-stable across runs");
}

#[test]
fn multiplicity_two_count_matches_the_hand_count() {
    let dir = tempfile::tempdir().unwrap();
    let a2h2 = write_file(dir.path(), "a2h2.json", A2H2);

    let out = stdout_of(&["count", "--system", a2h2.to_str().unwrap(), "--lambda", "2,1"]);
    assert_eq!(out.trim(), "10");

    let mut child = bin()
        .args(["count", "--system", "-", "--lambda", "2,1"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(A2H2.as_bytes()).unwrap();
    let piped = child.wait_with_output().unwrap();
    assert!(piped.status.success());
    assert_eq!(String::from_utf8(piped.stdout).unwrap().trim(), "10");
}

#[test]
fn formula_roundtrips_through_eval() {
    let dir = tempfile::tempdir().unwrap();
    let nonuni = write_file(dir.path(), "nonuni.json", NONUNI);
    let nonuni = nonuni.to_str().unwrap();

    let formula = stdout_of(&["formula", "--system", nonuni, "--chamber", "c1"]);
    let fpath = write_file(dir.path(), "formula.json", &formula);
    let fpath = fpath.to_str().unwrap();

    for lam in ["1,1", "2,3", "3,2", "5,9", "4,7"] {
        let direct = stdout_of(&["count", "--system", nonuni, "--lambda", lam]);
        let evaled = stdout_of(&["eval", "--formula", fpath, "--lambda", lam]);
        assert_eq!(evaled, direct, "eval and count disagree at ({lam})");
    }
}

#[test]
fn sum_heights_reproduce_doubled_multiplicities() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = write_file(dir.path(), "a2.json", A2);
    let a2h2 = write_file(dir.path(), "a2h2.json", A2H2);

    let formula = stdout_of(&["sum", "--system", a2.to_str().unwrap(), "--chamber", "c1", "--h", "2,2,2"]);
    let fpath = write_file(dir.path(), "sum.json", &formula);

    for lam in ["6,2", "5,3"] {
        let direct = stdout_of(&["count", "--system", a2h2.to_str().unwrap(), "--lambda", lam]);
        let evaled = stdout_of(&["eval", "--formula", fpath.to_str().unwrap(), "--lambda", lam]);
        assert_eq!(evaled, direct, "box heights of 2 must count doubled columns at ({lam})");
    }
}

#[test]
fn sum_weight_matches_direct_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = write_file(dir.path(), "a2.json", A2);

    // x ranges over (x1, x2, x3) with x1 + x3 = 3, x2 + x3 = 1; the weight
    // x1 takes values 3 and 2.
    let formula = stdout_of(&[
        "sum",
        "--system",
        a2.to_str().unwrap(),
        "--chamber",
        "c1",
        "--weight",
        r#"[{"exps":[1,0,0],"coeff":"1"}]"#,
    ]);
    let fpath = write_file(dir.path(), "weighted.json", &formula);
    let evaled = stdout_of(&["eval", "--formula", fpath.to_str().unwrap(), "--lambda", "3,1"]);
    assert_eq!(evaled.trim(), "5");
}

#[test]
fn ehrhart_reports_the_period() {
    let dir = tempfile::tempdir().unwrap();
    let pair = write_file(dir.path(), "pair.json", PAIR);
    let pair = pair.to_str().unwrap();

    let out = stdout_of(&["ehrhart", "--system", pair, "--lambda0", "1"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["period"], 6);
    assert_eq!(v["degree"], 1);
    assert_eq!(v["classes"].as_array().unwrap().len(), 6);

    let vals: Vec<String> = ["0", "1", "6", "7"]
        .iter()
        .map(|k| stdout_of(&["ehrhart", "--system", pair, "--lambda0", "1", "--k", k]).trim().to_string())
        .collect();
    assert_eq!(vals, ["1", "0", "2", "1"]);
}

#[test]
fn volume_prints_the_chamber_volume() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = write_file(dir.path(), "a2.json", A2);

    let out = stdout_of(&["volume", "--system", a2.to_str().unwrap(), "--chamber", "c1"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["poly"], "a2");
    assert_eq!(v["degree"], 1);
}

#[test]
fn embed_check_counts_the_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write_file(dir.path(), "tri.json", TRIANGLE);

    let out = stdout_of(&["embed", "--polytope", tri.to_str().unwrap(), "--check"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["check"]["matched"], true);
    assert_eq!(v["check"]["polytope_points"], "10");
    assert_eq!(v["check"]["embedded_count"], "10");
}

#[test]
fn validate_accepts_the_example_systems() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = write_file(dir.path(), "a2.json", A2);
    let nonuni = write_file(dir.path(), "nonuni.json", NONUNI);

    for sys in [&a2, &nonuni] {
        let out = stdout_of(&["validate", "--system", sys.to_str().unwrap(), "--box", "-6..6"]);
        assert!(out.starts_with("ok:"), "unexpected validate output: {out}");
    }
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write_file(dir.path(), "bad.json", r#"{"n":2,"vectors":[[1,0]]}"#);
    let a2 = write_file(dir.path(), "a2.json", A2);
    let missing = missing.to_str().unwrap();
    let a2 = a2.to_str().unwrap();

    assert_eq!(exit_code(&["chambers", "--system", missing]), 2);
    assert_eq!(exit_code(&["formula", "--system", a2, "--chamber", "c9"]), 2);
    assert_eq!(exit_code(&["count", "--system", a2, "--lambda", "1,2,3"]), 2);
    assert_eq!(exit_code(&["validate", "--system", a2, "--box", "6..-6"]), 2);
    assert_eq!(exit_code(&["eval", "--formula", a2, "--lambda", "1,1"]), 2);
    assert_eq!(exit_code(&["count", "--system", dir.path().join("nope.json").to_str().unwrap(), "--lambda", "1,1"]), 2);
}

#[test]
fn degenerate_twist_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = write_file(dir.path(), "a2.json", A2);

    let out = run(&["exp-sum", "--system", a2.to_str().unwrap(), "--chamber", "c1", "--twist", "0,0,0"]);
    assert_eq!(out.status.code().unwrap(), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not generic"));
}

#[test]
fn renders_group_conjugate_poles() {
    let dir = tempfile::tempdir().unwrap();
    let nonuni = write_file(dir.path(), "nonuni.json", NONUNI);
    let nonuni = nonuni.to_str().unwrap();

    let text = stdout_of(&["formula", "--system", nonuni, "--chamber", "c1", "--format", "text"]);
    assert!(text.contains("pole (0,1/2)"), "missing periodic pole in:\n{text}");

    let latex = stdout_of(&["formula", "--system", nonuni, "--chamber", "c1", "--format", "latex"]);
    assert!(latex.contains("\\cos"), "conjugate poles must render as cosines:\n{latex}");
    let again = stdout_of(&["formula", "--system", nonuni, "--chamber", "c1", "--format", "latex"]);
    assert_eq!(latex, again);
}
