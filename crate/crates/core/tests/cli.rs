//! Runs the binary on the example jobs and compares against golden reports.
//! Set `GRADEDQ_BLESS=1` to rewrite the goldens.

mod common;

use common::{golden_matches, jobs_dir, run_cli as run};

const JOBS: [(&str, i32); 5] = [
    ("empty", 0),
    ("lie_algebroid", 0),
    ("poisson_coisotropic", 0),
    ("standard_courant", 0),
    ("varying_b_field", 1),
];

#[test]
fn example_jobs_match_goldens() {
    for (name, code) in JOBS {
        assert!(golden_matches(name, code), "{name} differs from its golden report");
    }
}

#[test]
fn reports_are_deterministic() {
    let job = jobs_dir().join("standard_courant.toml");
    let a = run(&["--job", job.to_str().unwrap()]);
    let b = run(&["--job", job.to_str().unwrap()]);
    assert_eq!(a, b);
}

#[test]
fn parse_errors_exit_with_two() {
    let job = jobs_dir().join("bad_expression.toml");
    let (code, stdout, stderr) = run(&["--job", job.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(stderr.contains("column 7"), "{stderr}");
}

#[test]
fn missing_job_and_unknown_check_exit_with_two() {
    assert_eq!(run(&["--job", "/nonexistent.toml"]).0, 2);
    let job = jobs_dir().join("empty.toml");
    assert_eq!(run(&["--job", job.to_str().unwrap(), "--check", "bogus"]).0, 2);
}

#[test]
fn seed_override_changes_only_sampling() {
    let job = jobs_dir().join("standard_courant.toml");
    let (code, stdout, _) = run(&["--job", job.to_str().unwrap(), "--seed", "99", "--samples", "3"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("seed: 99\n") && stdout.contains("samples: 3\n"));
}
