use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mg_opcon::cost::CostWeights;
use mg_opcon::scenario::read_log_csv;
use mg_opcon::FleetConfig;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mg-opcon"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn day1() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/day1_load.csv")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn setpoints_of_reference_fleet() {
    let v = json(&run(&["setpoints"]));
    assert_eq!(floats(&v["u_t"]), [-0.8]);
    assert_eq!(floats(&v["u_s"]), [0.0]);
    assert_eq!(floats(&v["u_r"]), [2.2, 1.55]);
}

#[test]
fn setpoints_with_rated_override() {
    let v = json(&run(&["setpoints", "--rated", "1.0,0.5"]));
    assert_eq!(floats(&v["u_r"]), [2.0, 1.5]);
}

#[test]
fn dispatch_reference_step() {
    let input = fixture("step_rho03.json");
    let v = json(&run(&["dispatch", "--input", input.to_str().unwrap()]));
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    assert!(close(v["rho"].as_f64().unwrap(), 0.3));
    for (got, want) in floats(&v["p_t"])
        .into_iter()
        .chain(floats(&v["p_s"]))
        .chain(floats(&v["p_r"]))
        .zip([0.2, 0.3, 1.2, 0.55])
    {
        assert!(close(got, want), "{got} vs {want}");
    }
    assert!(v["residual"].as_f64().unwrap().abs() <= 1e-12);
    assert!(close(floats(&v["next_state"]["x"])[0], 2.0 - 0.3 * 0.25));
}

#[test]
fn infeasible_dispatch_exits_2() {
    let input = fixture("step_overload.json");
    let out = run(&["dispatch", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn check_day1_passes() {
    let out = run(&["check", "--forecast", day1().to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["requirements"]["steps"].as_array().unwrap().len(), 25);
    assert!(v["overlap"]["conflicts"].as_array().unwrap().is_empty());
}

#[test]
fn check_overload_exits_1() {
    let f = fixture("overload_bounds.csv");
    let out = run(&["check", "--forecast", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], Value::Bool(false));
    assert_eq!(v["requirements"]["steps"][1]["max_ok"], Value::Bool(false));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(run(&["simulate", "--controller", "greedy"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let out = run(&["simulate", "--alpha", "1.5", "--days", "1", "--nsim", "2", "--np", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_fleet_file_exits_1() {
    let out = run(&["setpoints", "--fleet", "/nonexistent/fleet.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn scenarios_reproduce_day1_mid_series() {
    let out = run(&[
        "scenarios",
        "--bounds",
        day1().to_str().unwrap(),
        "--step-hours",
        "0.25",
        "--alpha",
        "0.5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let published =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/day1_load_s5.txt"))
            .unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("k,wd_1"));
    let got: Vec<f64> = rows
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let want: Vec<f64> = published.lines().map(|l| l.trim().parse().unwrap()).collect();
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 5e-13, "{g} vs {w}");
    }
}

#[test]
fn scenarios_emit_bounds_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let out = run(&[
        "scenarios",
        "--seed",
        "3",
        "--days",
        "1",
        "--emit-bounds",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let b = mg_opcon::scenario::load_bounds_csv(&path, 0.25).unwrap();
    let cfg = FleetConfig::case_study();
    assert_eq!(b, mg_opcon::scenario::synth_profiles(3, 1, &cfg.params));
}

#[test]
fn simulate_log_round_trips_total_cost() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.csv");
    let v = json(&run(&[
        "simulate",
        "--days",
        "1",
        "--np",
        "8",
        "--nsim",
        "48",
        "--alpha",
        "0.3",
        "--out",
        log.to_str().unwrap(),
    ]));
    let total = v["total_cost"].as_f64().unwrap();
    let stage = floats(&v["stage_costs"]);
    assert_eq!(stage.len(), 48);
    assert_eq!(stage.iter().sum::<f64>(), total);

    let text = std::fs::read_to_string(&log).unwrap();
    assert!(text.starts_with("k,rho,p_t_1,p_s_1,p_r_1,p_r_2,x_1,delta_1,stage_cost"));
    let run = read_log_csv(text.as_bytes(), &log).unwrap();
    assert_eq!(run.steps.len(), 48);
    let w = CostWeights::from_params(&FleetConfig::case_study().params);
    assert_eq!(run.total_cost(&w), total);
}

fn compare(threads: &str, timing: bool) -> Output {
    let mut args = vec!["compare", "--days", "1", "--np", "8", "--nsim", "40"];
    if !timing {
        args.push("--no-timing");
    }
    bin()
        .args(&args)
        .env("MG_OPCON_THREADS", threads)
        .output()
        .unwrap()
}

#[test]
fn compare_is_deterministic_without_timing() {
    let a = compare("1", false);
    let b = compare("2", false);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "s,alpha,controller,total_cost,runtime_ms");
    assert_eq!(rows.len(), 34);
    assert!(rows[1..].iter().all(|r| r.ends_with(',')));
    assert!(rows[1].starts_with("0,0.0,uc-ems,"));
    assert!(rows[33].starts_with("10,1.0,fixed-on,"));
}

#[test]
fn compare_reports_runtime_when_timed() {
    let out = compare("1", true);
    let text = String::from_utf8(out.stdout).unwrap();
    for row in text.lines().skip(1) {
        let ms: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(ms >= 0.0);
    }
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = compare("zero", false);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_reports_zero_regret_and_agreement() {
    let v = json(&run(&["oracle", "--days", "1", "--start", "10", "--uc-np", "6"]));
    assert!(v["max_regret"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["regret"]["regrets"].as_array().unwrap().len(), 11);
    assert_eq!(v["commitment"]["agree"], Value::Bool(true));
}
