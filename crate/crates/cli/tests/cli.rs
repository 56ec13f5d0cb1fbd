use mqs_core::dynamics::Method;
use mqs_core::io::{
    read_bath_csv, read_modes_csv, read_report_csv, read_samples_csv, read_trajectory_csv,
};
use std::fs::{self, File};
use std::path::Path;
use std::process::{Command, Output};

fn mqs(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mqs"))
        .args(args)
        .arg("--plain")
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("input.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn report_value(path: &Path, key: &str) -> String {
    read_report_csv(File::open(path).unwrap())
        .unwrap()
        .into_iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("{key} missing"))
        .1
}

#[test]
fn zero_modes_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_modes = 0\n");
    let out = mqs(&["bath", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_modes"));
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "omega0 = 1\nmystery = 3\n");
    let out = mqs(&["kernel", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mystery"));
}

#[test]
fn too_few_samples_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sample_count = 10\n");
    let out = mqs(&["sample", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sample_count"));
}

#[test]
fn empty_method_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = mqs(&["simulate", "--methods", ""], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = mqs(&["simulate", "--methods", "merged"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bath_reports_total_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let out = mqs(&["bath"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let line = stdout
        .lines()
        .find(|l| l.contains("sum_gamma2_omega2"))
        .unwrap();
    let value: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!((value - 5.0625).abs() < 1e-12);

    let bath = read_bath_csv(File::open(dir.path().join("bath.csv")).unwrap()).unwrap();
    assert_eq!(bath.len(), 100);
    let weight: f64 = bath.iter().map(|r| r.weight).sum();
    assert!((weight - 5.0625).abs() < 1e-12);
    let modes = read_modes_csv(File::open(dir.path().join("modes.csv")).unwrap()).unwrap();
    assert_eq!(modes.len(), 100);
}

#[test]
fn simulate_is_deterministic_and_reproducible_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_modes = 16\nt_end = 2\n");
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    let args = [
        "simulate",
        "--config",
        &cfg,
        "--methods",
        "full,gle",
        "--format",
        "csv",
    ];
    assert!(mqs(&args, &a).status.success());
    assert!(mqs(&args, &b).status.success());
    let manifest = a.join("manifest.cfg").to_string_lossy().into_owned();
    let rerun = [
        "simulate",
        "--config",
        &manifest,
        "--methods",
        "full,gle",
        "--format",
        "csv",
    ];
    assert!(mqs(&rerun, &c).status.success());

    for name in ["trajectory_full.csv", "trajectory_gle.csv", "summary.csv"] {
        let first = fs::read(a.join(name)).unwrap();
        assert_eq!(
            first,
            fs::read(b.join(name)).unwrap(),
            "{name} differs between runs"
        );
        assert_eq!(
            first,
            fs::read(c.join(name)).unwrap(),
            "{name} differs after manifest rerun"
        );
    }
    assert!(!a.join("simulate.svg").exists());

    let (traj, meta) =
        read_trajectory_csv(File::open(a.join("trajectory_gle.csv")).unwrap()).unwrap();
    assert_eq!(meta.method, Method::Gle);
    assert_eq!(meta.seed, Some(42));
    assert_eq!(traj.len(), 2001);
    assert_eq!(traj.q[0], 1.0);
    let l2: f64 = report_value(&a.join("summary.csv"), "full_vs_gle_relative_l2")
        .parse()
        .unwrap();
    assert!(l2 < 1e-3);
}

#[test]
fn seed_flag_changes_the_bath_draw() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_modes = 8\nt_end = 1\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let base = [
        "simulate",
        "--config",
        &cfg,
        "--methods",
        "full",
        "--format",
        "csv",
    ];
    assert!(mqs(&base, &a).status.success());
    let mut other = base.to_vec();
    other.extend(["--seed", "7"]);
    assert!(mqs(&other, &b).status.success());
    assert_ne!(
        fs::read(a.join("trajectory_full.csv")).unwrap(),
        fs::read(b.join("trajectory_full.csv")).unwrap()
    );
}

#[test]
fn compare_reads_back_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_modes = 16\nt_end = 20\n");
    let sim = dir.path().join("sim");
    let out = mqs(
        &[
            "simulate",
            "--config",
            &cfg,
            "--methods",
            "markov_quantum,bohmian",
        ],
        &sim,
    );
    assert!(out.status.success());
    assert!(sim.join("simulate.svg").exists());
    let a = sim.join("trajectory_markov_quantum.csv");
    let b = sim.join("trajectory_bohmian.csv");
    let cmp = dir.path().join("cmp");
    let out = mqs(
        &[
            "compare",
            "--a",
            a.to_str().unwrap(),
            "--b",
            b.to_str().unwrap(),
        ],
        &cmp,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(report_value(&cmp.join("report.csv"), "a"), "markov_quantum");
    let ratio: f64 = report_value(&cmp.join("report.csv"), "frequency_ratio")
        .parse()
        .unwrap();
    let freq = |k: &str| -> f64 { report_value(&sim.join("summary.csv"), k).parse().unwrap() };
    let expected = freq("bohmian_frequency") / freq("markov_quantum_frequency");
    assert!((ratio - expected).abs() < 1e-12 * expected);
    assert!((ratio - 1.0).abs() > 1e-3);
    assert!(cmp.join("report.txt").exists());
}

#[test]
fn compare_missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = mqs(
        &[
            "compare",
            "--a",
            "/nonexistent/a.csv",
            "--b",
            "/nonexistent/b.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn figure1_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = mqs(&["figure1"], dir.path());
    assert!(out.status.success());
    for (file, method) in [
        ("figure1_quantum.csv", Method::MarkovQuantum),
        ("figure1_bohmian.csv", Method::Bohmian),
    ] {
        let (traj, meta) = read_trajectory_csv(File::open(dir.path().join(file)).unwrap()).unwrap();
        assert_eq!(meta.method, method);
        assert_eq!(traj.q[0], 1.0);
        assert!((traj.t_end() - 10.0).abs() < 1e-9);
    }
    let svg = fs::read_to_string(dir.path().join("figure1.svg")).unwrap();
    assert!(svg.contains(">quantum<") && svg.contains(">bohmian<"));
    let manifest = fs::read_to_string(dir.path().join("manifest.cfg")).unwrap();
    assert!(manifest.contains("# command: figure1"));
    assert!(manifest.contains("# output: figure1.svg"));
}

#[test]
fn sample_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_modes = 16\nsample_count = 2000\n");
    let out = mqs(
        &[
            "sample",
            "--config",
            &cfg,
            "--dump-samples",
            "--with-momenta",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let (samples, momenta) =
        read_samples_csv(File::open(dir.path().join("samples.csv")).unwrap()).unwrap();
    assert!(momenta);
    assert_eq!(samples.len(), 2000);
    assert_eq!(samples[0].x.len(), 16);
    let verdict = report_value(&dir.path().join("report.csv"), "verdict");
    assert!(verdict == "PASS" || verdict == "FAIL");
}
