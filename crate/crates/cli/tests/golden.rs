//! Structured output for every fixture is pinned byte for byte. Set
//! `GKMKIT_BLESS=1` to rewrite the golden files after an intended change.

mod common;

use common::{all_fixtures, golden_path, structured, GOLDEN_COMMANDS};

#[test]
fn structured_outputs_match_golden_files() {
    let bless = std::env::var("GKMKIT_BLESS").is_ok_and(|v| v == "1");
    let mut mismatches = Vec::new();
    for name in all_fixtures() {
        for cmd in GOLDEN_COMMANDS {
            let first = structured(&name, cmd);
            let second = structured(&name, cmd);
            assert_eq!(first.stdout, second.stdout, "{cmd} {name} is not stable across runs");
            assert_eq!(first.code, second.code);
            let path = golden_path(&name, cmd);
            if bless {
                std::fs::write(&path, &first.stdout).unwrap();
                continue;
            }
            match std::fs::read_to_string(&path) {
                Ok(expected) if expected == first.stdout => {}
                Ok(_) => mismatches.push(format!("{} differs", path.display())),
                Err(_) => mismatches.push(format!("{} is missing", path.display())),
            }
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn golden_files_declare_their_exit_code() {
    for name in all_fixtures() {
        let out = structured(&name, "validate");
        let last = out.stdout.lines().last().unwrap();
        assert_eq!(last, format!("exit={}", out.code), "{name}");
        assert_eq!(out.code, common::expected_validate_exit(&name), "{name}");
    }
}
