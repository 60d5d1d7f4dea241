//! Binary-level checks: exit-code contract and report surfaces.
//!
//! Exit codes: 0 success, 1 domain error (parse/validation), 2
//! verification failure (failed suite, failed cross-check, incomplete
//! enumeration).

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duality"))
        .args(args)
        .output()
        .expect("spawn binary")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("duality-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("write temp file");
    path
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn unknown_subcommand_is_a_domain_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn parse_errors_exit_one_with_line_number() {
    let path = temp_file("bad.dp", "DUBITS 1\nQ 0\n");
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "{stderr}");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn divider_validation_error_exits_one() {
    let path = temp_file(
        "badweights.dp",
        "DUBITS 1\nDIVIDE 0.4 0.4\nPATH 1\nEND\nPATH 2\nEND\nCOMBINE\n",
    );
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("normalization"), "{stderr}");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn search_report_carries_expected_fields() {
    let out = run(&[
        "search", "--n", "2", "--tau", "2", "--model", "2", "--seed", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("queries_used: 1"), "{stdout}");
    assert!(
        stdout.contains("outcome: click index=2 bits=10"),
        "{stdout}"
    );
    // Model 2 on the N=4 search state: expected time 4·t0.
    assert!(stdout.contains("time=4.0000000000"), "{stdout}");
}

#[test]
fn search_range_error_exits_one() {
    assert_eq!(
        run(&["search", "--n", "2", "--tau", "7"]).status.code(),
        Some(1)
    );
}

#[test]
fn sat_enumeration_exit_codes() {
    // Complete enumeration under the certain-click model: success.
    let or2 = temp_file("or2.cnf", "p cnf 2 1\n1 2 0\n");
    let out = run(&["sat", or2.to_str().unwrap(), "--enumerate", "--model", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("crosscheck: match"), "{stdout}");
    let _ = std::fs::remove_file(&or2);

    // Thresholded read-out blind to 1/√32 amplitudes: incomplete, exit 2.
    let wide = temp_file("wide.cnf", "p cnf 5 1\n1 -1 0\n");
    let out = run(&[
        "sat",
        wide.to_str().unwrap(),
        "--enumerate",
        "--model",
        "3",
        "--epsilon",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("incomplete: true"), "{stdout}");
    let _ = std::fs::remove_file(&wide);

    // Malformed DIMACS: domain error.
    let bad = temp_file("bad.cnf", "p cnf 1 2\n1 0\n");
    assert_eq!(run(&["sat", bad.to_str().unwrap()]).status.code(), Some(1));
    let _ = std::fs::remove_file(&bad);
}

#[test]
fn sat_single_shot_reports_unsat_indication() {
    let contra = temp_file("contra.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let out = run(&["sat", contra.to_str().unwrap(), "--model", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("unsat_indication"), "{stdout}");
    let _ = std::fs::remove_file(&contra);
}

#[test]
fn mz_sweep_emits_requested_rows() {
    let out = run(&["mz-sweep", "--points", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 5);
    for line in stdout.lines() {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 2);
        fields[0].parse::<f64>().unwrap();
        fields[1].parse::<f64>().unwrap();
    }
}

#[test]
fn verify_suites_pass_and_unknown_suite_errors() {
    for suite in ["optics-cnot", "lcu", "dividers", "all"] {
        let out = run(&["verify", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "suite {suite}");
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.contains("PASS"), "{stdout}");
        assert!(!stdout.contains("FAIL"), "{stdout}");
    }
    assert_eq!(run(&["verify", "--suite", "bogus"]).status.code(), Some(1));
}

#[test]
fn run_respects_emit_selection() {
    let path = temp_file("h.dp", "DUBITS 1\nH 0\n");
    let amplitudes_only = run(&["run", path.to_str().unwrap(), "--emit", "amplitudes"]);
    let stdout = String::from_utf8(amplitudes_only.stdout).unwrap();
    assert!(stdout.contains("amplitudes:"), "{stdout}");
    assert!(!stdout.contains("outcome:"), "{stdout}");

    let outcome_only = run(&["run", path.to_str().unwrap(), "--emit", "outcome"]);
    let stdout = String::from_utf8(outcome_only.stdout).unwrap();
    assert!(!stdout.contains("amplitudes:"), "{stdout}");
    assert!(stdout.contains("outcome:"), "{stdout}");
    let _ = std::fs::remove_file(&path);
}
