use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab")).args(args).output().expect("lab runs")
}

fn run_in(dir: &Path, suite: &str, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec!["run", "--suite", suite, "--out", out];
    args.extend_from_slice(extra);
    lab(&args)
}

fn rows(dir: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(dir.join("report.csv")).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["suite", "check", "case", "measured", "bound", "pass"]);
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn list_suites_names_every_suite() {
    let o = lab(&["list-suites"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for s in ["norms", "ktau", "cubes", "kernels", "blocks", "fourier", "all"] {
        assert!(text.lines().any(|l| l == s), "{s} missing");
    }
}

#[test]
fn norms_suite_passes_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "norms", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(dir.path());
    assert!(rows.iter().any(|r| &r[1] == "norm_axioms"));
    assert!(rows.iter().all(|r| &r[5] == "true"));
    assert!(dir.path().join("config_echo.toml").exists());
}

#[test]
fn kernels_suite_reports_identity_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("k.toml");
    std::fs::write(&cfg, "[kernels]\nexponents = [[2.0, 2.0]]\nrank_grids = [8]\ndecay_grid = 24\n").unwrap();
    let out = dir.path().join("out");
    let o = run_in(&out, "kernels", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&out);
    let id = rows.iter().find(|r| &r[1] == "kernel_identity").expect("kernel_identity row");
    assert!(id[3].parse::<f64>().unwrap() < 1e-12);
    assert!(out.join("snumbers_p2_2_j1.csv").exists());
    let svg = std::fs::read_to_string(out.join("decay_p2_2_j1.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn report_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "seed = 11\n[ktau]\ncertificate_grids = [8, 12]\nbrute_steps = 20\n[ktau.model]\nkind = \"lebesgue\"\nm = 2\nn = 8\n").unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let args = ["--config", cfg.to_str().unwrap()];
    for (d, threads) in [(&a, "1"), (&b, "1"), (&c, "4")] {
        let mut extra = args.to_vec();
        extra.extend(["--threads", threads]);
        // norms and ktau both draw random samples from the seed
        let o = run_in(d, "norms", &extra);
        assert!(o.status.success());
        let o = run_in(&d.join("k"), "ktau", &extra);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["report.csv", "k/report.csv"] {
        let ra = std::fs::read(a.join(f)).unwrap();
        assert_eq!(ra, std::fs::read(b.join(f)).unwrap(), "{f} differs between runs");
        assert_eq!(ra, std::fs::read(c.join(f)).unwrap(), "{f} differs across thread counts");
    }
}

#[test]
fn seed_override_changes_random_samples() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_in(&a, "norms", &["--seed", "1"]).status.success());
    assert!(run_in(&b, "norms", &["--seed", "2"]).status.success());
    assert_ne!(std::fs::read(a.join("report.csv")).unwrap(), std::fs::read(b.join("report.csv")).unwrap());
    assert!(std::fs::read_to_string(b.join("config_echo.toml")).unwrap().contains("seed = 2"));
}

#[test]
fn invalid_config_reports_line_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\n\n[cubes]\ngrid = 36\np = [2.0, 3.0]\n").unwrap();
    let o = run_in(&dir.path().join("out"), "cubes", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 5") && err.contains("cubes.p"), "{err}");
    assert!(!dir.path().join("out").join("report.csv").exists());
}

#[test]
fn failing_check_sets_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    // a grid this coarse cannot reproduce the slope within the tolerance
    std::fs::write(&cfg, "[kernels]\nexponents = [[2.0, 2.0]]\nrank_grids = [8]\ndecay_grid = 6\ndecay_window = [2, 17]\nslope_tolerance = 0.001\n").unwrap();
    let o = run_in(&dir.path().join("out"), "kernels", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let rows = rows(&dir.path().join("out"));
    assert!(rows.iter().any(|r| &r[1] == "snumber_decay" && &r[5] == "false"));
}

#[test]
fn unknown_suite_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "everything", &[]);
    assert_eq!(o.status.code(), Some(2));
}
