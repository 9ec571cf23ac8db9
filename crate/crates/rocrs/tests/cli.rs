//! End-to-end tests of the command-line interface: formats, determinism,
//! seed resolution, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn rocrs() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rocrs"));
    // Tests control seeding explicitly; shield against an ambient CRS_SEED.
    cmd.env_remove("CRS_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    rocrs().args(args).output().expect("spawn rocrs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("readable output")
}

#[test]
fn gen_fig5_and_fig6_are_byte_stable_fixtures() {
    let fig5 = run(&["gen", "fig5"]);
    assert!(fig5.status.success());
    assert_eq!(
        stdout(&fig5),
        "n 5\ne 0 1 1.0\ne 1 2 0.1\ne 2 3 0.5\ne 3 4 0.4\n"
    );
    let fig6 = run(&["gen", "fig6"]);
    assert_eq!(
        stdout(&fig6),
        "n 5\ne 0 1 1.0\ne 1 2 0.1\ne 2 3 0.5\ne 3 4 0.2\ne 3 4 0.2\n"
    );
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = run(&["gen", "forest-union", "--k", "2", "--n", "8", "--seed", "7"]);
    let b = run(&["gen", "forest-union", "--k", "2", "--n", "8", "--seed", "7"]);
    let c = run(&["gen", "forest-union", "--k", "2", "--n", "8", "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_round_trips_through_the_parser() {
    let out = run(&["gen", "random", "--n", "5", "--m", "7", "--seed", "3"]);
    assert!(out.status.success());
    let parsed = rocrs::fileio::parse_instance(&stdout(&out)).unwrap();
    let direct = rocrs::gen::random_multigraph(5, 7, 3).unwrap();
    assert_eq!(parsed, direct);
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = run(&["gen", "mystery"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_byte_identical_across_reruns_and_worker_counts() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("fig6.txt");
    assert!(run(&["gen", "fig6", "--out", inst.to_str().unwrap()])
        .status
        .success());
    let mut outputs = Vec::new();
    for (tag, workers) in [("a", "1"), ("b", "3"), ("c", "1")] {
        let csv = dir.path().join(format!("{}.csv", tag));
        let out = run(&[
            "simulate",
            "--instance",
            inst.to_str().unwrap(),
            "--scheme",
            "rocrs",
            "--trials",
            "20000",
            "--seed",
            "11",
            "--workers",
            workers,
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        outputs.push(read(&csv));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    assert!(outputs[0].starts_with("# scheme=rocrs seed=11 trials=20000 adversary=-\n"));
}

#[test]
fn crs_seed_environment_variable_is_the_fallback() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("fig5.txt");
    assert!(run(&["gen", "fig5", "--out", inst.to_str().unwrap()])
        .status
        .success());
    let flagged = run(&[
        "simulate",
        "--instance",
        inst.to_str().unwrap(),
        "--scheme",
        "prior",
        "--trials",
        "5000",
        "--seed",
        "21",
    ]);
    let env_seeded = rocrs()
        .env("CRS_SEED", "21")
        .args(&[
            "simulate",
            "--instance",
            inst.to_str().unwrap(),
            "--scheme",
            "prior",
            "--trials",
            "5000",
        ])
        .output()
        .unwrap();
    let defaulted = run(&[
        "simulate",
        "--instance",
        inst.to_str().unwrap(),
        "--scheme",
        "prior",
        "--trials",
        "5000",
    ]);
    assert_eq!(flagged.stdout, env_seeded.stdout);
    assert!(stdout(&defaulted).contains("seed=0"));
    let bad = rocrs()
        .env("CRS_SEED", "not-a-number")
        .args(&["gen", "path", "--m", "3"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn simulate_labels_the_adversary() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("fig5.txt");
    assert!(run(&["gen", "fig5", "--out", inst.to_str().unwrap()])
        .status
        .success());
    let out = run(&[
        "simulate",
        "--instance",
        inst.to_str().unwrap(),
        "--scheme",
        "sample-ocrs",
        "--adversary",
        "reverse",
        "--trials",
        "10000",
        "--seed",
        "2",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("adversary=reverse"));
    // The adversary flag is rejected outside the adversarial-order scheme.
    let bad = run(&[
        "simulate",
        "--instance",
        inst.to_str().unwrap(),
        "--scheme",
        "rocrs",
        "--adversary",
        "reverse",
        "--trials",
        "10",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn simulate_parse_failures_carry_line_numbers() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("bad.txt");
    std::fs::write(&inst, "n 3\ne 0 oops 0.5\n").unwrap();
    let out = run(&[
        "simulate",
        "--instance",
        inst.to_str().unwrap(),
        "--scheme",
        "rocrs",
        "--trials",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "stderr: {}", err);
}

#[test]
fn verify_suites_report_and_exit_by_outcome() {
    // The counterexample suites other than the count reproduction pass.
    for suite in ["coupling", "expectation", "prefix", "load-bounds"] {
        let out = run(&["verify", suite]);
        assert_eq!(out.status.code(), Some(0), "suite {}", suite);
        assert!(stdout(&out).contains("PASS"));
        assert!(!stdout(&out).contains("FAIL"));
    }
    // The appendix count reproduction reports its known mismatch: the strict
    // per-labeling inequality and the ordering flip hold, the published
    // 13/2/1 and 0/11/5 classification totals do not.
    let out = run(&["verify", "appendix"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("CHECK fig5-flip fig5 PASS"));
    assert!(text.contains("CHECK fig6-strict-inequality fig6 PASS"));
    assert!(text.contains("CHECK fig6-off-sample-counts fig6 FAIL"));
    assert!(text.contains("enumerated 12/2/2"));
}

#[test]
fn verify_accepts_an_instance_file() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("path4.txt");
    assert!(run(&[
        "gen", "path", "--m", "4", "--seed", "5", "--out",
        inst.to_str().unwrap()
    ])
    .status
    .success());
    let out = run(&["verify", "prefix", "--instance", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("CHECK prefix-stability path4 PASS"));
}

#[test]
fn verify_cap_exceeded_exits_three() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("long.txt");
    let mut text = String::from("n 18\n");
    for i in 0..17 {
        text.push_str(&format!("e {} {} 0.1\n", i, i + 1));
    }
    std::fs::write(&inst, text).unwrap();
    let out = run(&["verify", "expectation", "--instance", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("CAP"));
}

#[test]
fn mofs_reports_the_uniform_point_targets() {
    let out = run(&[
        "mofs", "--k", "2", "--n", "6", "--trials", "20000", "--seed", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# scheme=mofs-k2"));
    assert!(text.contains(",0.5,"));
    let again = run(&[
        "mofs", "--k", "2", "--n", "6", "--trials", "20000", "--seed", "4",
    ]);
    assert_eq!(text, stdout(&again));
}
