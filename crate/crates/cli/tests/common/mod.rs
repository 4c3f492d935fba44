#![allow(dead_code)]

use std::path::PathBuf;

use gkmkit_cli::{run_with, Env};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn fixture(name: &str) -> String {
    fixtures_dir().join(name).to_string_lossy().into_owned()
}

/// Every `.gkm` file in the fixture directory, sorted by name.
pub fn all_fixtures() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures_dir())
        .expect("fixture directory")
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".gkm"))
        .collect();
    names.sort();
    names
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_env(args: &[&str], env: &Env) -> Outcome {
    let mut argv = vec!["gkmkit".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(&argv, env, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).expect("utf-8 stdout"),
        stderr: String::from_utf8(err).expect("utf-8 stderr"),
    }
}

pub fn run(args: &[&str]) -> Outcome {
    run_env(args, &Env::default())
}

/// Commands whose structured output is pinned per fixture.
pub const GOLDEN_COMMANDS: [&str; 2] = ["validate", "report"];

pub fn golden_path(fixture: &str, command: &str) -> PathBuf {
    golden_dir().join(format!("{}.{command}.txt", fixture.trim_end_matches(".gkm")))
}

/// Structured output of `command` on `fixture`.
pub fn structured(fixture_name: &str, command: &str) -> Outcome {
    run(&["--format", "structured", command, &fixture(fixture_name)])
}

/// Expected exit code of `validate` for each fixture.
pub fn expected_validate_exit(name: &str) -> i32 {
    match name {
        "parse_error.gkm" => 2,
        "bad_congruence.gkm" | "broken_connection.gkm" | "broken_involution.gkm" | "dependent_labels.gkm"
        | "loop.gkm" | "valence_mismatch.gkm" => 1,
        _ => 0,
    }
}
