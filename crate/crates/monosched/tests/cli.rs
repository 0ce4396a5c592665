use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monosched"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("monosched-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn instance(name: &str, text: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("SCHED_THREADS").output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_prints_rational_makespan() {
    let p = instance("equal.json", r#"{"epsilon":"1","t":1,"jobs":["4","4","4"],"speeds":["1","1","1"]}"#);
    let out = run(&["solve", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["makespan"], "4");
    let rows = r["machines"].as_array().unwrap();
    assert!(rows.iter().all(|m| m["jobs"].as_array().unwrap().len() == 1));
}

#[test]
fn trace_and_float_add_fields() {
    let p = instance("trace.json", r#"{"epsilon":"1","t":1,"jobs":["2","2"],"speeds":["1","2","4"]}"#);
    let r = json(&run(&["solve", p.to_str().unwrap(), "--trace", "--float"]));
    assert!(r["trace"]["visited"].is_array());
    assert_eq!(r["trace"]["path"].as_array().unwrap().len(), 3);
    assert!(r["makespan_float"].is_number());
}

#[test]
fn negative_job_exits_2() {
    let p = instance("neg.json", r#"{"epsilon":"1","t":1,"jobs":["4","-1"],"speeds":["1"]}"#);
    let out = run(&["solve", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("jobs[1]"));
}

#[test]
fn zero_epsilon_exits_2() {
    let p = instance("eps0.json", r#"{"epsilon":"0","t":1,"jobs":["4"],"speeds":["1"]}"#);
    let out = run(&["solve", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
    let q = instance("eps1.json", r#"{"epsilon":"1","t":1,"jobs":["4"],"speeds":["1"]}"#);
    assert_eq!(run(&["solve", q.to_str().unwrap(), "--epsilon", "0"]).status.code(), Some(2));
}

#[test]
fn missing_field_exits_2() {
    let p = instance("nospeeds.json", r#"{"epsilon":"1","t":1,"jobs":["4"]}"#);
    let out = run(&["solve", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("speeds"));
}

#[test]
fn payments_on_symmetric_instance_are_equal() {
    let p = instance("pay.json", r#"{"epsilon":"1","t":1,"jobs":["4","4","4"],"speeds":["1","1","1"]}"#);
    let out = run(&["payments", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["machines"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(r["work"], rows[0]["work"]);
        assert_eq!(r["payment"], rows[0]["payment"]);
        assert_eq!(r["utility"], rows[0]["utility"]);
    }
}

#[test]
fn gen_is_deterministic() {
    let a = scratch("gen-a.json");
    let b = scratch("gen-b.json");
    for p in [&a, &b] {
        assert_eq!(run(&["gen", "--seed", "17", "-o", p.to_str().unwrap()]).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // the generated file is a valid instance
    assert_eq!(run(&["solve", a.to_str().unwrap()]).status.code().map(|c| c != 2), Some(true));
}

#[test]
fn zero_trials_exit_0_with_empty_report() {
    let out = run(&["verify", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn injected_fault_exits_1() {
    let out = run(&["verify", "--trials", "10", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("approximation"));
}

#[test]
fn suite_exit_code_matches_report() {
    for cmd in ["verify", "monotonicity"] {
        let out = run(&[cmd, "--trials", "20", "--seed", "3"]);
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().count(), 20);
        let failed = text.lines().any(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["verdict"] == "fail");
        assert_eq!(out.status.code(), Some(if failed { 1 } else { 0 }), "{cmd}");
    }
}

#[test]
fn verify_at_degree_4_exits_0() {
    let out = run(&["verify", "--t", "4", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn thread_count_does_not_change_report() {
    let one = run(&["verify", "--trials", "12", "--threads", "1"]);
    let many = bin().args(["verify", "--trials", "12"]).env("SCHED_THREADS", "8").output().unwrap();
    assert_eq!(one.stdout, many.stdout);
}
