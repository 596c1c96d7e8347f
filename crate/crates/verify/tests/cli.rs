use std::process::{Command, Output};

use lcstar_verify::{Instance, SuiteReport};

fn lcstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcstar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = lcstar(&[
        "verify",
        "--suite",
        "theorem",
        "--seed",
        "3",
        "--trials",
        "5",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = SuiteReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.instances.len(), 5);
    assert_eq!(report.config.seed, 3);
    assert!(stdout(&o).contains("0 failures"));
}

#[test]
fn failing_run_exits_one_with_replay_line() {
    let o = lcstar(&[
        "verify", "--suite", "calculus", "--trials", "2", "--tol", "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let replay = out
        .lines()
        .find_map(|l| l.trim().strip_prefix("replay: "))
        .expect("replay line");
    let args: Vec<&str> = replay.split_whitespace().skip(1).collect();
    // The replayed instance fails the same way on its own.
    let again = lcstar(&args);
    assert_eq!(again.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        lcstar(&["verify", "--suite", "bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(lcstar(&["verify", "--blocks", "9"]).status.code(), Some(2));
    assert_eq!(
        lcstar(&["check", "--instance", "/nonexistent/instance.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn gen_then_check_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    let p = path.to_str().unwrap();
    let o = lcstar(&[
        "gen", "--seed", "11", "--blocks", "4", "--depth", "3", "--out", p,
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let inst = Instance::from_json(&text).unwrap();
    assert_eq!(inst.seed, 11);

    // gen is deterministic and matches stdout output
    let printed = lcstar(&["gen", "--seed", "11", "--blocks", "4", "--depth", "3"]);
    assert_eq!(stdout(&printed).trim_end(), text);

    let report_path = dir.path().join("check.json");
    let o = lcstar(&[
        "check",
        "--instance",
        p,
        "--json",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = SuiteReport::from_json(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report.instances[0].digest, inst.digest());

    // regenerating from the seed gives the same instance
    let regen = dir.path().join("regen.json");
    lcstar(&[
        "check",
        "--seed",
        "11",
        "--blocks",
        "4",
        "--depth",
        "3",
        "--json",
        regen.to_str().unwrap(),
    ]);
    let regen = SuiteReport::from_json(&std::fs::read_to_string(&regen).unwrap()).unwrap();
    assert_eq!(regen, report);
}

#[test]
fn spec_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"seed": 5, "block_count": 2, "chain_depth": 1}"#).unwrap();
    let a = lcstar(&["gen", "--spec", spec.to_str().unwrap()]);
    let b = lcstar(&["gen", "--seed", "5", "--blocks", "2", "--depth", "1"]);
    assert_eq!(stdout(&a), stdout(&b));
    let c = lcstar(&["gen", "--spec", spec.to_str().unwrap(), "--seed", "6"]);
    assert_ne!(stdout(&a), stdout(&c));

    std::fs::write(&spec, r#"{"seed": 5, "colour": 1}"#).unwrap();
    assert_eq!(
        lcstar(&["gen", "--spec", spec.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_instance_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"seed\": 1,\n  \"system\": [\n").unwrap();
    let o = lcstar(&["check", "--instance", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}
