use std::fs;

use ffwd_lab::cli::{run, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use ffwd_lab::Report;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ffwd(args: &[&str]) -> Out {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("ffwd").chain(args.iter().copied()), &mut o, &mut e);
    Out { code, stdout: String::from_utf8(o).unwrap(), stderr: String::from_utf8(e).unwrap() }
}

#[test]
fn passing_run_prints_report_and_verdicts() {
    let out = ffwd(&["teup", "--points", "5"]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);
    let r = Report::from_json(&out.stdout).unwrap();
    assert_eq!(r.data.trials.len(), 5);
    assert!(out.stderr.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn failing_verdict_exits_one() {
    // no trials cannot meet a success-frequency criterion
    let out = ffwd(&["--trials", "0", "grover"]);
    assert_eq!(out.code, EXIT_FAIL);
    assert!(out.stderr.contains("FAIL grover/success"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ffwd(&[]).code, EXIT_USAGE);
    assert_eq!(ffwd(&["no-such-experiment"]).code, EXIT_USAGE);
    assert_eq!(ffwd(&["grover", "--size", "many"]).code, EXIT_USAGE);
    // parses, but is rejected by the experiment
    let out = ffwd(&["grover", "--size", "5"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.starts_with("error:"));
    assert_eq!(ffwd(&["fourier-pe", "--ell", "4", "--b", "4"]).code, EXIT_USAGE);
    assert_eq!(ffwd(&["--config", "/nonexistent/cfg.json"]).code, EXIT_USAGE);
}

#[test]
fn help_and_version_exit_zero() {
    let out = ffwd(&["--help"]);
    assert_eq!(out.code, EXIT_PASS);
    assert!(out.stdout.contains("shor-seem") && out.stdout.contains("--tolerance-profile"));
    assert_eq!(ffwd(&["--version"]).code, EXIT_PASS);
    assert!(ffwd(&["oeotl", "--help"]).stdout.contains("--phase-estimation"));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": {"name": "grover", "size": 64}, "seed": 11, "trials": 6, "tolerance_profile": "strict"}"#).unwrap();

    let a = Report::from_json(&ffwd(&["--config", cfg.to_str().unwrap()]).stdout).unwrap();
    assert_eq!(a.data.config.seed, 11);
    assert_eq!(a.data.config.trials, 6);
    assert_eq!(a.data.trials.len(), 6);
    let size = serde_json::to_value(&a.data.config.experiment).unwrap()["size"].clone();
    assert_eq!(size, 64);

    let b = Report::from_json(&ffwd(&["--config", cfg.to_str().unwrap(), "--seed", "12", "--trials", "2"]).stdout).unwrap();
    assert_eq!((b.data.config.seed, b.data.config.trials), (12, 2));
    assert_eq!(b.data.config.experiment, a.data.config.experiment);

    // a subcommand on the command line replaces the file's experiment
    let c = Report::from_json(&ffwd(&["--config", cfg.to_str().unwrap(), "teup", "--points", "2"]).stdout).unwrap();
    assert_eq!(c.data.config.experiment.name(), "teup");
    assert_eq!(c.data.config.seed, 11);
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": {"name": "warp-drive"}}"#).unwrap();
    assert_eq!(ffwd(&["--config", cfg.to_str().unwrap()]).code, EXIT_USAGE);
}

#[test]
fn out_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = ffwd(&["teup", "--points", "4", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_PASS);
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 5);

    let bad = dir.path().join("missing/t.json");
    assert_eq!(ffwd(&["teup", "--out", bad.to_str().unwrap()]).code, EXIT_FAIL);
}

#[test]
fn same_flags_same_data() {
    let a = Report::from_json(&ffwd(&["--seed", "9", "--trials", "20", "fourier-pe"]).stdout).unwrap();
    let b = Report::from_json(&ffwd(&["fourier-pe", "--seed", "9", "--trials", "20"]).stdout).unwrap();
    assert_eq!(a.data_json().unwrap(), b.data_json().unwrap());
}

#[test]
fn instance_files_drive_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    fs::write(&q, "A\n2\n0.5 0  0.1 0.2\n0.1 -0.2  -0.3 0\nB\n2\n0 0  0.4 0\n-0.4 0  0 0\n").unwrap();
    let out = ffwd(&["--trials", "3", "quadratic-ff", "--instance", q.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);

    let g = dir.path().join("g.txt");
    fs::write(&g, "vertices: 4\n0: 1 3\n1: 2\n2: 3\nsigma: (0 1 2 3)\n").unwrap();
    let out = ffwd(&["cga", "--instance", g.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);
    let r = Report::from_json(&out.stdout).unwrap();
    assert_eq!(r.data.trials.len(), 1);

    fs::write(&g, "vertices: 4\nsigma: (0 9)\n").unwrap();
    assert_eq!(ffwd(&["cga", "--instance", g.to_str().unwrap()]).code, EXIT_USAGE);
}
