use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn psimax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psimax"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = psimax(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn schema(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn simulate_then_reuse_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let common = ["--scenarios", "4000", "--seed", "3", "--threads", "1", "--out", out];

    let text = ok(&[&["simulate"], &common[..]].concat());
    assert!(text.contains("4000 scenarios"), "{text}");
    for (file, line) in [
        ("results.csv", "# psimax-results v1"),
        ("summary.csv", "# psimax-summary v1"),
        ("curves.csv", "# psimax-curves v1"),
    ] {
        assert_eq!(schema(&dir.path().join(file)), line);
    }

    let results = dir.path().join("results.csv");
    let results = results.to_str().unwrap();
    let text = ok(&[&["correlate", "--results", results], &common[..]].concat());
    assert!(text.contains("Lge4"), "{text}");
    assert_eq!(schema(&dir.path().join("correlation.csv")), "# psimax-correlation v1");

    let text = ok(&[&["hull-split", "--results", results], &common[..]].concat());
    assert!(text.contains("inside p95"), "{text}");
    assert_eq!(schema(&dir.path().join("hull_split.csv")), "# psimax-hull-split v1");
}

#[test]
fn same_seed_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        ok(&[
            "simulate",
            "--scenarios",
            "3000",
            "--threads",
            threads,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
    }
    for file in ["results.csv", "summary.csv", "curves.csv"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "f = 0.5\nn_scenarios = 500\nphi_grid_points = 8\n").unwrap();
    let out = dir.path().join("o");
    let text = ok(&[
        "analytic",
        "--config",
        cfg.to_str().unwrap(),
        "--scenarios",
        "1500",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(text.contains("6 stevens curves"), "{text}");
    assert_eq!(schema(&out.join("analytic_curves.csv")), "# psimax-curves v1");
    assert_eq!(schema(&out.join("expected_bs.csv")), "# psimax-expected-bs v1");
}

#[test]
fn expected_bs_prints_requested_targets() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&[
        "expected-bs",
        "--phi",
        "3.141592653589793",
        "--phi",
        "1.5707963267948966",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "{text}");
    let value: f64 = lines[0].split("= ").nth(1).unwrap().parse().unwrap();
    // A half-circle target needs 5 stations on average.
    assert!((value - 5.0).abs() < 1e-9, "{value}");
}

#[test]
fn bad_input_fails_cleanly() {
    for args in [
        &["simulate", "--threads", "0"][..],
        &["simulate", "--config", "/nonexistent/c.toml"],
        &["expected-bs", "--phi", "7.0"],
        &["frobnicate"],
    ] {
        let out = psimax(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
}
