//! End-to-end tests of the binary: stdout values, CSV contracts, exit
//! codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delay-advection"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn dexp_prints_hand_values() {
    let out = run(&["dexp", "--t", "1.0", "--tau", "0.5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1.5");

    let out = run(&["dexp", "--t", "3", "--tau", "1", "--lambda", "-1,0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "-0.5");
}

#[test]
fn delay_ml_prints_value() {
    let out = run(&["delay-ml", "--alpha", "0.5", "--t", "1.0", "--tau", "0.5"]);
    assert!(out.status.success());
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 0.20212).abs() <= 1e-4);
}

#[test]
fn malformed_flags_exit_2() {
    let out = run(&["dexp", "--t", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "solve",
        "--ic",
        "tanh",
        "--a",
        "1",
        "--tau",
        "0.3",
        "--x",
        "0:1:3",
        "--t",
        "0:1:3",
        "--out",
        "/tmp/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // domain-invalid parameter values are usage errors too
    let out = run(&["delay-ml", "--alpha", "1.5", "--t", "1", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn overflow_exits_3_with_term_index() {
    let out = run(&["dexp", "--t", "2000", "--tau", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("failing term index"), "stderr: {err}");
}

#[test]
fn tolerance_failure_exits_1() {
    let out = run(&[
        "verify",
        "residual-integer",
        "--tau",
        "0.3",
        "--x",
        "-1:1:5",
        "--t",
        "0.5:2:5",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("status=fail"));
}

#[test]
fn verify_residual_integer_passes_at_spec_tolerance() {
    let out = run(&[
        "verify",
        "residual-integer",
        "--tau",
        "0.3",
        "--x",
        "-2:2:20",
        "--t",
        "0.5:5:20",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    for key in [
        "max_abs_residual=",
        "argmax_x=",
        "argmax_t=",
        "points_checked=",
        "status=pass",
    ] {
        assert!(text.contains(key), "missing {key} in {text}");
    }
}

#[test]
fn solve_plateau_round_trips_through_csv() {
    let dir = std::env::temp_dir().join("da-cli-solve");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("plateau.csv");
    let out = run(&[
        "solve",
        "--ic",
        "gaussian",
        "--a",
        "1",
        "--tau",
        "0.5",
        "--x",
        "-1:1:9",
        "--t",
        "0:0.5:4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,t,u"));
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let want = (-f[0] * f[0]).exp();
        assert_eq!(f[2], want, "plateau value differs at x={} t={}", f[0], f[1]);
    }
}

#[test]
fn figure_outputs_are_deterministic_and_match_regimes() {
    let dir_a = std::env::temp_dir().join("da-cli-figs-a");
    let dir_b = std::env::temp_dir().join("da-cli-figs-b");
    for d in [&dir_a, &dir_b] {
        std::fs::create_dir_all(d).unwrap();
        for fig in ["fig1", "fig2", "fig3"] {
            let out = run(&["figure", fig, "--out", d.to_str().unwrap()]);
            assert!(out.status.success(), "{fig}: {}", stdout(&out));
        }
    }
    for fig in ["fig1.csv", "fig2.csv", "fig3.csv"] {
        let a = std::fs::read(dir_a.join(fig)).unwrap();
        let b = std::fs::read(dir_b.join(fig)).unwrap();
        assert_eq!(a, b, "{fig} not byte-identical across runs");
    }

    // fig3: the delayed wave packet column must exceed the initial max of 1
    let text = std::fs::read_to_string(dir_a.join("fig3.csv")).unwrap();
    let mut max_delayed = f64::NEG_INFINITY;
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        max_delayed = max_delayed.max(f[2]);
    }
    assert!(max_delayed > 1.0, "fig3 delayed max {max_delayed}");

    // fig1 columns: tau = 0 column is the classical cosh(5 - t)
    let text = std::fs::read_to_string(dir_a.join("fig1.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, "t,u_tau_0,u_tau_0.30,u_tau_0.32,u_tau_0.34");
    let first = text.lines().nth(1).unwrap();
    let f: Vec<f64> = first.split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(f[0], -1.0);
    assert_eq!(f[1], (5.0f64 - -1.0).cosh());
    assert_eq!(f[2], 0.0); // delayed solutions vanish for t < 0
}

#[test]
fn compare_identical_files_reports_zero() {
    let dir = std::env::temp_dir().join("da-cli-compare");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("field.csv");
    let out = run(&[
        "solve",
        "--ic",
        "cosh",
        "--a",
        "1",
        "--tau",
        "0.3",
        "--x",
        "-1:1:5",
        "--t",
        "0.5:2:4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "compare",
        "--exact",
        path.to_str().unwrap(),
        "--oracle",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("sup_error=0e0"), "{text}");
    assert!(text.contains("l2_error=0e0"), "{text}");
}

#[test]
fn separable_solve_matches_plateau_product() {
    let dir = std::env::temp_dir().join("da-cli-sep");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sep.csv");
    let out = run(&[
        "solve",
        "--ic",
        "gaussian",
        "--a",
        "1",
        "--tau",
        "0.2",
        "--g",
        "exp:1",
        "--x",
        "-1:1:5",
        "--t",
        "0.02:0.2:4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&path).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let want = (-f[0] * f[0]).exp() * f[1].exp();
        assert!((f[2] - want).abs() <= 1e-9, "x={} t={}", f[0], f[1]);
    }
    assert!(Path::new(&path).exists());
}
