//! End-to-end tests of the command-line surface: generation, file round
//! trips, analysis, marking, property checks, experiments and the
//! reproduction suite's exit behavior.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_omega-succinct"))
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("omega-succinct-test-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn gen_emits_parsable_hoa_and_dot() {
    let out = bin()
        .args(["gen", "gn", "--n", "3"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed = omega_succinct::hoa::parse_hoa(&text).unwrap();
    assert_eq!(parsed, omega_succinct::families::build_gn(3).unwrap());

    let dot = bin()
        .args(["gen", "gn", "--n", "3", "--dot"])
        .output()
        .unwrap();
    assert!(dot.status.success());
    let dot_text = String::from_utf8(dot.stdout).unwrap();
    assert_eq!(dot_text.matches("[shape=").count(), 5 + 1); // states + init point
}

#[test]
fn gen_file_round_trip_for_families() {
    let dir = tmpdir("roundtrip");
    for (family, n) in [("dn", 3usize), ("rn-prime", 4), ("sn", 6)] {
        let path = dir.join(format!("{family}-{n}.hoa"));
        let status = bin()
            .args(["gen", family, "--n", &n.to_string(), "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = omega_succinct::hoa::parse_hoa(&text).unwrap();
        assert_eq!(parsed, omega_succinct::families::by_name(family, n).unwrap());
    }
}

#[test]
fn gen_rejects_unknown_family() {
    let out = bin().args(["gen", "zn", "--n", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_example_chain_values() {
    let dir = tmpdir("analyze");
    let chain_path = dir.join("chain.json");
    std::fs::write(
        &chain_path,
        omega_succinct::mdp::to_json(&omega_succinct::mdp::example_chain()),
    )
    .unwrap();
    let s1_path = dir.join("s1.hoa");
    std::fs::write(
        &s1_path,
        omega_succinct::hoa::to_hoa(&omega_succinct::families::build_sn(1).unwrap(), None),
    )
    .unwrap();
    let dba_path = dir.join("s1-dba.hoa");
    std::fs::write(
        &dba_path,
        omega_succinct::hoa::to_hoa(&omega_succinct::families::build_sn_dba(1).unwrap(), None),
    )
    .unwrap();

    // Letter-informed optimum on the worked example.
    let out = bin()
        .args(["analyze", "--mode", "psyn", "--mdp"])
        .arg(&chain_path)
        .arg("--automaton")
        .arg(&s1_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().next().unwrap().trim() == "1/6", "{stdout}");
    let report: serde_json::Value = serde_json::from_str(
        &stdout.lines().skip(1).collect::<Vec<_>>().join("\n"),
    )
    .unwrap();
    assert_eq!(report["value"], "1/6");
    assert!(report["accepting_mecs"].as_array().unwrap().len() == 1);

    let out = bin()
        .args(["analyze", "--mode", "psem", "--mdp"])
        .arg(&chain_path)
        .arg("--dba")
        .arg(&dba_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().next().unwrap().trim(), "1/4");
}

#[test]
fn analyze_rejects_malformed_mdp() {
    let dir = tmpdir("badmdp");
    let path = dir.join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let s1_path = dir.join("s1.hoa");
    std::fs::write(
        &s1_path,
        omega_succinct::hoa::to_hoa(&omega_succinct::families::build_sn(1).unwrap(), None),
    )
    .unwrap();
    let out = bin()
        .args(["analyze", "--mode", "psyn", "--mdp"])
        .arg(&path)
        .arg("--automaton")
        .arg(&s1_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mark_reports_bound_checks() {
    let out = bin().args(["mark", "--n", "2"]).output().unwrap();
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["n"], 2);
    assert_eq!(report["p_size"], 5);
    assert_eq!(report["dba_states"], 5);
    assert!(report["p_size_meets_bound"].as_bool().unwrap());
    assert!(report["some_state_unmarked"].as_bool().unwrap());
}

#[test]
fn props_checks_families() {
    let dir = tmpdir("props");
    let rn = dir.join("rn.hoa");
    std::fs::write(
        &rn,
        omega_succinct::hoa::to_hoa(&omega_succinct::families::build_rn(2).unwrap(), None),
    )
    .unwrap();
    let out = bin()
        .args(["props", "--check", "unambiguous", "--automaton"])
        .arg(&rn)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["holds"].as_bool().unwrap());

    let gn = dir.join("gn.hoa");
    std::fs::write(
        &gn,
        omega_succinct::hoa::to_hoa(&omega_succinct::families::build_gn(1).unwrap(), None),
    )
    .unwrap();
    let out = bin()
        .args(["props", "--check", "separating", "--automaton"])
        .arg(&gn)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!report["holds"].as_bool().unwrap());
    assert!(report["witness"].is_string());
}

#[test]
fn spot_check_runs_and_is_byte_stable() {
    let run = || {
        let out = bin()
            .args(["experiment", "gfm-spotcheck", "--n", "1", "--seeds", "0..6"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "report must be byte-stable across runs");
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert!(report["all_equal"].as_bool().unwrap());
}

#[test]
fn lower_bound_experiment_via_alias() {
    let out = bin()
        .args(["experiment", "thm10", "--n", "2", "--flavor", "safety"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["attained_all"].as_bool().unwrap());
    assert_eq!(report["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn reproduce_all_reports_the_known_failure() {
    // The worked-example syntactic value is pinned to the published 1/8,
    // which the letter-informed engine computes as 1/6; reproduce-all must
    // therefore exit 1 with criterion 1 as the only failure.
    let out = bin()
        .args(["reproduce-all", "--max-n", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!report["all_passed"].as_bool().unwrap());
    let failing: Vec<u64> = report["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["passed"].as_bool().unwrap())
        .map(|c| c["id"].as_u64().unwrap())
        .collect();
    assert_eq!(failing, vec![1]);
}
