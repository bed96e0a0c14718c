use std::path::{Path, PathBuf};

use rwalk_cli::run;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn rwalk(args: &[&str]) -> i32 {
    run(std::iter::once("rwalk").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn validate_accepts_bundled_walks() {
    for name in ["lazy.dist", "skew.dist"] {
        let path = configs().join(name);
        assert_eq!(rwalk(&["validate", "--dist", path.to_str().unwrap()]), 0, "{name}");
    }
}

#[test]
fn periodic_walk_fails_validation_with_exit_2() {
    let path = configs().join("srw.dist");
    assert_eq!(rwalk(&["validate", "--dist", path.to_str().unwrap()]), 2);

    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "srw.conf", &format!("[run]\ndist = {}\n", path.display()));
    assert_eq!(rwalk(&["verify-all", "--config", conf.to_str().unwrap()]), 2);
}

#[test]
fn rejection_message_names_strong_aperiodicity() {
    let d = rwalk_cli::commands::load_dist(Some(&configs().join("srw.dist")));
    let err = d.unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let msg = err.to_string();
    assert!(msg.contains("FAIL strong aperiodicity"), "{msg}");
}

#[test]
fn missing_dist_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "missing.conf", "[run]\ndist = nowhere.dist\n");
    assert_eq!(rwalk(&["verify-all", "--config", conf.to_str().unwrap()]), 1);
    assert_eq!(rwalk(&["validate", "--dist", "/nonexistent/walk.dist"]), 1);
    assert_eq!(rwalk(&["verify-all"]), 1);
}

#[test]
fn malformed_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.dist", "-1 0.5\n1 oops\n");
    assert_eq!(rwalk(&["validate", "--dist", bad.to_str().unwrap()]), 1);
    let neg = write(dir.path(), "neg.dist", "-1 -0.5\n1 1.5\n");
    assert_eq!(rwalk(&["validate", "--dist", neg.to_str().unwrap()]), 2);
    let conf = write(dir.path(), "typo.conf", "[run]\ndist = bad.dist\nsede = 3\n");
    assert_eq!(rwalk(&["verify-all", "--config", conf.to_str().unwrap()]), 1);
    assert_eq!(rwalk(&["no-such-command"]), 1);
    assert_eq!(rwalk(&["laws", "--tol-scale", "0"]), 1);
}

#[test]
fn laws_pass() {
    assert_eq!(rwalk(&["laws"]), 0);
    assert_eq!(rwalk(&["laws", "--check", "imk"]), 0);
}

#[test]
fn fluctuations_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let dist = configs().join("skew.dist");
    let out = dir.path().to_str().unwrap();
    let code = rwalk(&[
        "fluctuations",
        "--dist",
        dist.to_str().unwrap(),
        "--out",
        out,
        "--x-max",
        "4",
        "--horizon",
        "50",
    ]);
    assert_eq!(code, 0);
    let tables = std::fs::read_to_string(dir.path().join("tables.csv")).unwrap();
    let lines: Vec<&str> = tables.lines().collect();
    assert_eq!(lines[0], "x,mu_star,u_star,h,h_tilde");
    assert_eq!(lines.len(), 6);
    // Skew walk: mu*(-1) = 1/2, U*(0) = 1, h(0) = 1.
    let row1: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row1[1] - 0.5).abs() < 1e-12);
    let passage = std::fs::read_to_string(dir.path().join("passage.csv")).unwrap();
    assert_eq!(passage.lines().count(), 52);
}

#[test]
fn simulate_is_reproducible_and_worker_independent() {
    let dist = configs().join("lazy.dist");
    let mut bodies = Vec::new();
    for workers in ["1", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let args = [
            "simulate",
            "--dist",
            dist.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--n",
            "256",
            "--paths",
            "500",
            "--workers",
            workers,
            "--seed",
            "7",
        ];
        assert_eq!(rwalk(&args), 0);
        bodies.push(std::fs::read(dir.path().join("simulate.csv")).unwrap());
        assert!(dir.path().join("manifest.json").exists());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn verify_all_small_run_writes_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(
        dir.path(),
        "small.conf",
        &format!(
            "[run]\ndist = {}\nout = out\n[fluctuations]\nscales = 100, 400\nrenewal_scales = 100, 400\nconditioned_n = 128\n\
             [kernel]\nscales = 50, 100\nsplit_scales = 50, 100\n[montecarlo]\nn = 64\npaths = 200\nmodulus_paths = 50\n",
            configs().join("lazy.dist").display()
        ),
    );
    // Some verdicts fail at this scale; every artifact is still written.
    let code = rwalk(&["verify-all", "--config", conf.to_str().unwrap()]);
    assert!(code == 0 || code == 3, "exit {code}");
    let out = dir.path().join("out");
    for check in rwalk_cli::checks::ALL {
        assert!(out.join(format!("{check}.csv")).exists(), "{check}");
    }
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("check,verdict,passed,detail\n"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
}
