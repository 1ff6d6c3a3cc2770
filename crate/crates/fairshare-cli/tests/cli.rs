//! End-to-end behavior of the `fairshare` binary: exit codes, headers,
//! artifacts, and input handling.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fairshare"));
    cmd.env_remove("FAIRSHARE_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fairshare-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn help_reports_defaults_and_bands() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for needle in ["solve", "walk", "regions", "check", "grid-h 1/128", "3*stderr"] {
        assert!(text.contains(needle), "--help is missing `{needle}`");
    }
}

#[test]
fn invalid_inputs_exit_with_code_2() {
    let cases: &[&[&str]] = &[
        &["solve", "--preset", "nosuch"],
        &["solve"],
        &["solve", "--file", "/nonexistent/problem.json"],
        &["solve", "--preset", "triangle", "--disagreement", "2,2"],
        &["solve", "--preset", "triangle", "--disagreement", "0.1"],
        &["solve", "--preset", "triangle", "--methods", "bogus"],
        &["solve", "--preset", "triangle", "--dump-field"],
        &["walk", "--preset", "triangle"],
        &["walk", "--preset", "triangle", "--seed", "1", "--step", "0.5"],
        &["walk", "--preset", "triangle", "--seed", "1", "--variant", "nosuch"],
        &["regions", "--preset", "triangle", "--solver", "nosuch"],
        &["check", "nosuch"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "`{}` should exit 2, said: {}",
            args.join(" "),
            stderr(&out)
        );
        assert!(!stderr(&out).is_empty(), "`{}` gave no message", args.join(" "));
    }
}

#[test]
fn missing_file_message_names_the_path() {
    let out = run(&["solve", "--file", "/nonexistent/problem.json"]);
    assert!(stderr(&out).contains("/nonexistent/problem.json"));
}

#[test]
fn exhausted_move_budget_exits_with_code_3() {
    let out = run(&[
        "walk", "--preset", "triangle", "--seed", "1", "--walkers", "2", "--max-moves", "10",
    ]);
    assert_eq!(out.status.code(), Some(3), "said: {}", stderr(&out));
    assert!(stderr(&out).contains("move"));
}

#[test]
fn environment_seed_fills_in() {
    let out = bin()
        .args(["walk", "--preset", "triangle", "--walkers", "100"])
        .env("FAIRSHARE_SEED", "9")
        .output()
        .unwrap();
    assert!(out.status.success(), "said: {}", stderr(&out));
    assert!(stdout(&out).contains("# seed=9"));
}

#[test]
fn walk_repeats_byte_for_byte() {
    let args =
        ["walk", "--preset", "trapezoid", "--seed", "5", "--walkers", "2000"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let threaded = bin().args(args).args(["--threads", "3"]).output().unwrap();
    assert_eq!(first.stdout, threaded.stdout);
}

#[test]
fn solve_reads_a_problem_file_and_writes_artifacts() {
    let dir = scratch("solve");
    fs::create_dir_all(&dir).unwrap();
    let file = dir.join("problem.json");
    fs::write(
        &file,
        r#"{"vertices": [[0,0],[1,0],[0,1]], "disagreement": [0.1,0.1]}"#,
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = run(&[
        "solve",
        "--file",
        file.to_str().unwrap(),
        "--methods",
        "nash,ks",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "said: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("# file="));
    assert!(text.contains("# disagreement=0.1,0.1"));
    assert!(text.contains("nash") && text.contains("0.5"));

    let config: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("run-config.json")).unwrap())
            .unwrap();
    assert_eq!(config["command"], "solve");
    assert_eq!(config["methods"], "nash,ks");
    let csv = fs::read_to_string(out_dir.join("solutions.csv")).unwrap();
    assert!(csv.starts_with("method,u1,u2,diagnostics"));
    assert_eq!(csv.lines().count(), 3);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn preset_reference_in_a_file_overrides_vertices() {
    let dir = scratch("preset-ref");
    fs::create_dir_all(&dir).unwrap();
    let file = dir.join("problem.json");
    fs::write(
        &file,
        r#"{"vertices": [], "disagreement": [0,0], "preset": {"name": "triangle", "n": 16}}"#,
    )
    .unwrap();
    let out = run(&["solve", "--file", file.to_str().unwrap(), "--methods", "nash"]);
    assert!(out.status.success(), "said: {}", stderr(&out));
    assert!(stdout(&out).contains("0.5"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn regions_emits_csv_and_svg() {
    let dir = scratch("regions");
    let out = run(&[
        "regions",
        "--preset",
        "parabola",
        "--preset-n",
        "64",
        "--grid-step",
        "0.2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "said: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("# solver=nash"));
    assert!(text.contains("c1,c2,lap1,lap2,label1,label2"));
    let svg = fs::read_to_string(dir.join("regions.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("</svg>"));
    let csv = fs::read_to_string(dir.join("regions.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "c1,c2,lap1,lap2,label1,label2");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn walk_dumps_walker_rows_when_asked() {
    let dir = scratch("walkers");
    let out = run(&[
        "walk", "--preset", "triangle", "--seed", "4", "--walkers", "50",
        "--dump-walkers", "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "said: {}", stderr(&out));
    let csv = fs::read_to_string(dir.join("walkers.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "walker,u1,u2,moves");
    assert_eq!(csv.lines().count(), 51);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn check_axioms_passes_quickly() {
    let out = run(&["check", "axioms"]);
    assert!(out.status.success(), "said: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result=pass"));
    assert!(text.contains("MISMATCH") == false);
}
