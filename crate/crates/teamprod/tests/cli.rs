//! End-to-end tests of the command-line interface: exit codes, output
//! files, and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn teamprod(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teamprod"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

#[test]
fn solve_inline_matches_analytic_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let out = teamprod(&["solve", "--loyalty", "0"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    // free-riding baseline for the defaults is 0.128 per member
    assert!(text.contains("0.128"), "unexpected output:\n{text}");
    assert!(text.contains("converged: true"));
}

#[test]
fn solve_writes_equilibrium_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eq.json");
    let out = teamprod(
        &["solve", "--loyalty", "0.9", "--out", path.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed["converged"], serde_json::Value::Bool(true));
    assert_eq!(parsed["profile"]["efforts"].as_array().unwrap().len(), 5);
}

#[test]
fn solve_builtin_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = teamprod(&["solve", "--scenario", "team_t"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("scenario: team_t"));
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    let dir = tempfile::tempdir().unwrap();
    // usage error: unknown flag
    let out = teamprod(&["solve", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    // validation error: impossible parameter
    let out = teamprod(&["solve", "--returns-exponent", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // validation error: missing scenario
    let out = teamprod(&["solve", "--scenario", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // runtime/convergence error: starved iteration budget
    let out = teamprod(&["solve", "--max-iterations", "1"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--out-dir",
        "run",
        "--productivities",
        "15,25",
        "--returns-exponents",
        "0.45,0.55",
        "--effort-costs",
        "2.0",
        "--team-sizes",
        "3,5",
        "--loyalties",
        "0.0,0.45,0.9",
        "--seed",
        "7",
    ];
    let out = teamprod(&args, dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv1 = std::fs::read(dir.path().join("run/sweep.csv")).unwrap();
    let json1 = std::fs::read(dir.path().join("run/summary.json")).unwrap();

    let out = teamprod(&args, dir.path());
    assert!(out.status.success());
    let csv2 = std::fs::read(dir.path().join("run/sweep.csv")).unwrap();
    let json2 = std::fs::read(dir.path().join("run/summary.json")).unwrap();
    assert_eq!(csv1, csv2, "sweep.csv not byte-identical");
    assert_eq!(json1, json2, "summary.json not byte-identical");

    let text = String::from_utf8(csv1).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("config_index,productivity,returns_exponent,effort_cost"));
    // 2*2*1*2 production combos x 3 loyalty levels
    assert_eq!(lines.count(), 24);
}

#[test]
fn robustness_reports_are_seed_stable() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "robustness",
        "--trials",
        "16",
        "--noise",
        "0.15",
        "--seed",
        "99",
        "--out-dir",
        "rb",
    ];
    let out = teamprod(&args, dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let first = std::fs::read(dir.path().join("rb/robustness.json")).unwrap();
    let out = teamprod(&args, dir.path());
    assert!(out.status.success());
    let second = std::fs::read(dir.path().join("rb/robustness.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn dynamics_zero_rate_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = teamprod(
        &[
            "dynamics",
            "--periods",
            "10",
            "--rate",
            "0",
            "--initial-loyalty",
            "0.4",
            "--out-dir",
            "dyn",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("regime: stationary"));
    let csv = std::fs::read_to_string(dir.path().join("dyn/trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    // header + (10 + 1 periods) * 5 members
    assert_eq!(lines.len(), 1 + 11 * 5);
    // all member-0 rows identical across periods
    let member0: Vec<&str> = lines[1..]
        .iter()
        .filter(|l| l.split(',').nth(1) == Some("0"))
        .map(|l| l.split_once(',').unwrap().1)
        .collect();
    assert!(member0.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn case_study_runs_apache_with_counterfactuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = teamprod(
        &[
            "case-study",
            "apache",
            "--scale-mechanisms",
            "0.5",
            "--cap-team-size",
            "15",
            "--shift-loyalty",
            "0.15",
            "--out-dir",
            "cs",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("rubric: 60/60"));
    assert!(text.contains("monotone decline: true"));
    for file in [
        "cs/case_study.json",
        "cs/series.csv",
        "cs/cf1_scale_mechanisms.json",
        "cs/cf2_cap_team_size.json",
        "cs/cf3_shift_loyalty.json",
    ] {
        assert!(dir.path().join(file).exists(), "missing {file}");
    }
    let series = std::fs::read_to_string(dir.path().join("cs/series.csv")).unwrap();
    assert!(series.starts_with("phase,team_size,mean_loyalty,cohesion,effort,prediction"));
    assert_eq!(series.lines().count(), 5);
}

#[test]
fn case_study_loads_scenario_from_file() {
    let dir = tempfile::tempdir().unwrap();
    // copy the builtin apache scenario to a file and point the CLI at it
    let scenario_path = dir.path().join("my_apache.toml");
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    std::fs::copy(manifest.join("scenarios/apache.toml"), &scenario_path).unwrap();
    let out = teamprod(
        &[
            "case-study",
            scenario_path.to_str().unwrap(),
            "--out-dir",
            "cs2",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("case study: apache"));
}

#[test]
fn synergy_prints_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let out = teamprod(&["synergy", "--loyalty", "0.7"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("synergy ratio:"));
    assert!(text.contains("baseline (no mechanisms):"));
}

#[test]
fn invalid_scenario_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "schema = 1\nname = \"x\"\n").unwrap();
    let out = teamprod(&["solve", "--scenario", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
