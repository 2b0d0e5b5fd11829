use std::process::{Command, Output};

fn qdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdm")).args(args).env_remove("QDM_STEP_CAP").output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn examples_lists_bundled_problems() {
    let out = qdm(&["examples"]);
    assert!(out.status.success());
    let names = String::from_utf8(out.stdout).unwrap();
    for n in ["cp1", "cp2", "p1xp1", "sigma2", "sigma2-naive", "fano3"] {
        assert!(names.lines().any(|l| l == n), "{n}");
    }
}

#[test]
fn products_for_cp1() {
    let out = qdm(&["products", "cp1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("products:"), "{text}");
    let v = json(&qdm(&["products", "cp1", "--json"]));
    let cell = v["products"]["table"].as_array().unwrap().iter().find(|c| c["left"] == "b1" && c["right"] == "b1").unwrap();
    assert_eq!(cell["product"], "q1");
}

#[test]
fn naive_quantization_exits_3() {
    let out = qdm(&["pipeline", "sigma2-naive", "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["failure"]["stage"], "quantization");
    assert_eq!(v["failure"]["exit_code"], 3);
}

#[test]
fn validation_errors_exit_2() {
    assert_eq!(qdm(&["validate", "/nonexistent/problem.toml"]).status.code(), Some(2));
    let out = qdm(&["pipeline", "cp1", "--step-cap", "0", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["failure"]["kind"], "validation");
    assert_eq!(qdm(&["pipeline", "sigma2", "--mode", "rational"]).status.code(), Some(2));
}

#[test]
fn step_cap_from_environment_exits_4() {
    let out = Command::new(env!("CARGO_BIN_EXE_qdm")).args(["groebner", "sigma2"]).env("QDM_STEP_CAP", "1").output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn json_is_reproducible() {
    let a = qdm(&["pipeline", "sigma2", "--json"]);
    let b = qdm(&["pipeline", "sigma2", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["mirror"]["status"], json(&b)["mirror"]["status"]);
}

#[test]
fn problem_file_path_is_accepted() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/problems/cp2.toml");
    let out = qdm(&["groebner", path, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["groebner"]["standard_monomials"].as_array().unwrap().len(), 3);
}
