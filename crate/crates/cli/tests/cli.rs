use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn algflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algflow")).args(args).env_remove("ALGFLOW_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["t", "re_x1", "im_x1", "re_x2", "im_x2", "residual", "branch_distance"]
    );
    r.records().map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect()).collect()
}

fn manifest(csv: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(csv.with_extension("manifest.json")).unwrap()).unwrap()
}

#[test]
fn list_variants() {
    let all = stdout(&algflow(&["list"]));
    assert_eq!(all.lines().count(), 12);
    let pairs = stdout(&algflow(&["list", "--pairs"]));
    assert!(pairs.lines().any(|l| l.starts_with("A1_1") && l.contains("Y12")));
    let rational = stdout(&algflow(&["list", "--rational"]));
    let ids: Vec<&str> = rational.lines().skip(1).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(ids, ["A2_3", "A3_2"]);
}

#[test]
fn verify_all_writes_full_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.txt");
    let o = algflow(&["verify", "--all", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# algflow-certify/1\n"));
    assert_eq!(text.matches("[model ").count(), 11);
    assert_eq!(text.matches("[identity ").count(), 2);
    assert!(text.contains("[model A1_1]\nstatus=PASS\n"));
}

#[test]
fn verify_single_models() {
    let o = algflow(&["verify", "--model", "A2_2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("[identity A2_2=A2_5]\nstatus=PASS"));
    let o = algflow(&["verify", "--model", "A2_5"]);
    assert!(stdout(&o).contains("[model A2_5]\nstatus=PASS"));
    assert!(stdout(&o).contains("[identity A2_2=A2_5]\nstatus=PASS"));
    assert_eq!(code(&algflow(&["verify", "--model", "A9_9"])), 2);
    assert_eq!(code(&algflow(&["verify"])), 2);
}

#[test]
fn simulate_linear_case() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("lin.csv");
    let o = algflow(&["simulate", "--model", "A1_1", "--params", "a=1,0", "b=0,0", "--x0", "1,0", "-2,0", "--t1", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&out);
    assert_eq!(r.len(), 201);
    let last = r.last().unwrap();
    let e = std::f64::consts::E;
    for (got, want) in last[..5].iter().zip([1.0, e, 0.0, -2.0 * e, 0.0]) {
        assert!((got - want).abs() < 1e-12, "{last:?}");
    }
    assert!(last[5] < 1e-12);
    let m = manifest(&out);
    assert_eq!(m["model"], "A1_1");
    assert_eq!(m["outcome"]["termination"], "completed");
    assert_eq!(m["route"], "auto");
}

#[test]
fn simulate_constant_velocity() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("a31.csv");
    let o = algflow(&["simulate", "--model", "A3_1", "--params", "a=1,0", "b=0,0", "--x0", "0,0", "1,0", "--t1", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let last = rows(&out).pop().unwrap();
    for (got, want) in last[..5].iter().zip([2.0, 2.0, 0.0, 3.0, 0.0]) {
        assert!((got - want).abs() < 1e-10, "{last:?}");
    }
}

#[test]
fn simulate_residual_stays_small() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("gen.csv");
    let o = algflow(&[
        "simulate", "--model", "A1_1", "--params", "a=0.3,-0.2", "b=0.04,0.03", "--x0", "0.7,0.2", "-0.4,0.5", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(rows(&out).iter().all(|r| r[5] <= 1e-8));
}

#[test]
fn simulate_keeps_partial_output_at_singularity() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pole.csv");
    let o = algflow(&["simulate", "--model", "A1_1", "--params", "b=1,0", "--x0", "1,0", "0.2,0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = rows(&out);
    let m = manifest(&out);
    assert_eq!(m["outcome"]["termination"], "singular");
    assert_eq!(m["outcome"]["cause"], "blow_up");
    let t_est = m["outcome"]["t_est"].as_f64().unwrap();
    assert!(t_est > 0.05 && t_est < 0.2, "{t_est}");
    assert!(!r.is_empty() && r.len() < 201);
    assert!(r.last().unwrap()[0] <= t_est);
    assert_eq!(m["outcome"]["rows"], r.len());
}

#[test]
fn manifest_replay_is_bit_identical() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("a.csv");
    let again = dir.path().join("b.csv");
    let o = algflow(&[
        "simulate", "--model", "A2_4", "--params", "c0=0.1,0.2", "c1=-0.3,0", "c2=0.05,0.4", "--x0", "0.9,-0.1", "0.1,0.6", "--route", "y12",
        "--samples", "64", "--out", first.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = first.with_extension("manifest.json");
    assert_eq!(code(&algflow(&["simulate", "--manifest", m.to_str().unwrap(), "--out", again.to_str().unwrap()])), 0);
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&again).unwrap());
    assert_eq!(std::fs::read(&m).unwrap(), std::fs::read(again.with_extension("manifest.json")).unwrap());
}

#[test]
fn seed_variable_overrides_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_algflow"))
        .args(["simulate", "--model", "A1_1", "--x0", "1,0", "-1,0", "--samples", "4", "--out", out.to_str().unwrap()])
        .env("ALGFLOW_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(manifest(&out)["seed"], 42);
}

#[test]
fn compare_outcomes() {
    let lin = algflow(&["compare", "--model", "A1_1", "--params", "a=1,0", "--x0", "1,0", "-2,0", "--tol", "1e-9"]);
    assert_eq!(code(&lin), 0);
    let dev: f64 = stdout(&lin).lines().find_map(|l| l.strip_prefix("deviation=")).unwrap().parse().unwrap();
    assert!(dev <= 1e-10, "{dev}");

    let generic = algflow(&["compare", "--model", "A2_2", "--params", "c1=0.3,0.1", "c2=-0.2,0.4", "c3=0.1,-0.3", "--x0", "0.8,0.1", "-0.3,0.2"]);
    assert_eq!(code(&generic), 0, "{}", stdout(&generic));

    let pole = algflow(&["compare", "--model", "A1_1", "--params", "b=1,0", "--x0", "1,0", "0.2,0"]);
    assert_eq!(code(&pole), 0);
    assert!(stdout(&pole).contains("verdict=singular_agree"));

    let strict = algflow(&["compare", "--model", "A2_2", "--params", "c1=0.3,0.1", "c3=0.1,-0.3", "--x0", "0.8,0.1", "-0.3,0.2", "--tol", "1e-30"]);
    assert_eq!(code(&strict), 1);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["compare", "--model", "A1_1", "--params", "c0=1,0", "--x0", "1,0", "-1,0"][..],
        &["compare", "--model", "A1_1", "--params", "a=1;0", "--x0", "1,0", "-1,0"],
        &["compare", "--model", "B1", "--x0", "1,0", "-1,0"],
        &["compare", "--model", "A1_1", "--x0", "1,0"],
        &["compare", "--model", "A1_1", "--x0", "1,0", "1,0"],
        &["simulate", "--model", "A2_3", "--x0", "0,0", "1,0", "--out", "/nonexistent/x.csv"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&algflow(args)), 2, "{args:?}");
    }
}

const ISOCHRONOUS: &str = r#"{
    "model": "A1_1", "count": 100, "seed": 5, "period": 1.0,
    "params": {"a": {"center": [0.0, 6.283185307179586], "radius": 0.0}, "b": {"radius": 0.05}}
}"#;

#[test]
fn sweep_is_deterministic_and_finds_periods() {
    let dir = TempDir::new().unwrap();
    let grid = dir.path().join("grid.json");
    std::fs::write(&grid, ISOCHRONOUS).unwrap();
    let one = dir.path().join("w1.csv");
    let eight = dir.path().join("w8.csv");
    for (w, out) in [("1", &one), ("8", &eight)] {
        let o = algflow(&["sweep", "--grid", grid.to_str().unwrap(), "--workers", w, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let a = std::fs::read(&one).unwrap();
    assert_eq!(a, std::fs::read(&eight).unwrap());
    let mut r = csv::Reader::from_path(&one).unwrap();
    let classes: Vec<String> = r.records().map(|rec| rec.unwrap()[1].to_string()).collect();
    assert_eq!(classes.len(), 100);
    assert!(classes.iter().filter(|c| *c == "periodic").count() >= 90);
}

#[test]
fn empty_sweep() {
    let dir = TempDir::new().unwrap();
    let grid = dir.path().join("empty.json");
    std::fs::write(&grid, "").unwrap();
    let out = dir.path().join("out.csv");
    let o = algflow(&["sweep", "--model", "A2_1", "--grid", grid.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv::Reader::from_path(&out).unwrap().records().count(), 0);
}

#[test]
fn check_fast_passes_quickly() {
    let start = std::time::Instant::now();
    let o = algflow(&["check", "--fast"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(start.elapsed().as_secs() < 60);
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS ")).count() >= 10);
}

#[test]
fn injected_fault_is_named() {
    let o = algflow(&["check", "--fast", "--inject-fault", "A1_3"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL verify_model: A1_3"), "{}", stdout(&o));
}
