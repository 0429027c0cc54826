use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_traversal-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("TRAVERSAL_LAB_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const SMALL_SCAN: &str = "\
incident.energy = 0.5
barrier.height = 1.0
barrier.width = 2.0
barrier.v1 = 0.01
barrier.omega = 0.05
scan.axis = width
scan.lo = 1.0
scan.hi = 2.0
scan.n_points = 3
scan.methods = vis, wkb, nelson
nelson.paths = 200
";

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lab(&["frobnicate"], dir.path())), 2);
    assert_eq!(code(&lab(&["check", "--no-such-flag"], dir.path())), 2);
    assert_eq!(code(&lab(&[], dir.path())), 2);
    assert_eq!(code(&lab(&["--seed", "abc", "check"], dir.path())), 2);
    assert_eq!(code(&lab(&["scan"], dir.path())), 2);
    assert_eq!(code(&lab(&["check", "--only", "42"], dir.path())), 2);
}

#[test]
fn runtime_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lab(&["scan", "--config", "missing.cfg"], dir.path())), 1);
    std::fs::write(dir.path().join("bad.cfg"), "barrier.colour = red\n").unwrap();
    let o = lab(&["current", "--config", "bad.cfg"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("barrier.colour"));
}

#[test]
fn check_prints_a_summary_and_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/reference.cfg");
    let o = lab(&["check", "--config", cfg, "--only", "1,2,6"], dir.path());
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("PASS [ 1]") && out.contains("PASS [ 2]") && out.contains("PASS [ 6]"));
    assert!(out.contains("3/3 criteria passed"));
    assert_eq!(code(&lab(&["check", "--only", "1", "--strict"], dir.path())), 0);
}

#[test]
fn scan_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.cfg"), SMALL_SCAN).unwrap();
    let a = lab(&["scan", "--config", "small.cfg", "--out", "a", "--seed", "5"], dir.path());
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = lab(&["scan", "--config", "small.cfg", "--out", "b", "--seed", "5", "--threads", "2"], dir.path());
    assert_eq!(code(&b), 0);
    let c = lab(&["scan", "--config", "small.cfg", "--out", "c", "--seed", "6"], dir.path());
    assert_eq!(code(&c), 0);
    let read = |d: &str| std::fs::read(dir.path().join(d).join("small.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    let text = String::from_utf8(read("a")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(dir.path().join("a/small.gp").exists());
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_traversal-lab"))
        .args(["check", "--only", "1"])
        .current_dir(dir.path())
        .env("TRAVERSAL_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_traversal-lab"))
        .args(["check", "--only", "1"])
        .current_dir(dir.path())
        .env("TRAVERSAL_LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn current_and_tbar_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lab(&["current", "--out", "o"], dir.path())), 0);
    assert_eq!(code(&lab(&["tbar", "--out", "o"], dir.path())), 0);
    let current = std::fs::read_to_string(dir.path().join("o/current.csv")).unwrap();
    assert!(current.starts_with("t,current\n"));
    assert_eq!(current.lines().count(), 202);
    let values: Vec<f64> = current.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    // periodic, and oscillating around the static transmission
    assert!((values[0] - values[200]).abs() < 1e-12);
    let (lo, hi) = values.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(lo < 0.0707 && hi > 0.0707);
    let tbar = std::fs::read_to_string(dir.path().join("o/tbar.csv")).unwrap();
    assert!(tbar.starts_with("omega,T_bar,T_static,flags\n"));
    assert_eq!(tbar.lines().count(), 46);
    assert!(dir.path().join("o/current.gp").exists() && dir.path().join("o/tbar.gp").exists());
}

#[test]
fn nelson_dumps_ensemble_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("n.cfg"), "barrier.width = 1.0\nnelson.paths = 100\n").unwrap();
    let o = lab(&["nelson", "--config", "n.cfg", "--out", "o", "--seed", "3"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(dir.path().join("o/nelson_summary.txt")).unwrap();
    assert!(summary.contains("tau_nelson = ") && summary.contains("seed = 3"));
    let paths = std::fs::read_to_string(dir.path().join("o/nelson_paths.csv")).unwrap();
    assert!(paths.lines().count() > 100);
    let traj = std::fs::read_to_string(dir.path().join("o/nelson_trajectories.csv")).unwrap();
    let ids: std::collections::BTreeSet<&str> = traj.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids.len(), 20);
    // the dumped paths are the first paths of the ensemble
    let first_dwell = paths.lines().nth(1).unwrap().split(',').nth(3).unwrap().to_string();
    let o2 = lab(&["nelson", "--config", "n.cfg", "--out", "p", "--seed", "3"], dir.path());
    assert_eq!(code(&o2), 0);
    let again = std::fs::read_to_string(dir.path().join("p/nelson_paths.csv")).unwrap();
    assert_eq!(again.lines().nth(1).unwrap().split(',').nth(3).unwrap(), first_dwell);
}
