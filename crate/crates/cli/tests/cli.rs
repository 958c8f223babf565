use std::collections::BTreeSet;
use std::process::{Command, Output};

fn anonpram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anonpram"))
        .args(args)
        .env_remove("ANONPRAM_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn list_prints_the_registry() {
    let out = anonpram(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let ids: Vec<String> = stdout(&out).lines().map(|l| l.split('\t').next().unwrap().to_string()).collect();
    assert_eq!(
        ids,
        ["arb-bnd-lv", "arb-unb-lv", "com-bnd-lv", "com-unb-lv", "arb-bnd-mc", "arb-unb-mc", "com-bnd-mc", "com-unb-mc"]
    );
}

#[test]
fn run_writes_one_row_per_trial() {
    let out = anonpram(&["run", "--algo", "arb-bnd-lv", "--n", "8", "--trials", "10", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algorithm_id,n,trial,seed,outcome,rounds,bits_total,cells_touched,outer_iterations"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "arb-bnd-lv");
        assert_eq!(fields[4], "CorrectPermutation");
    }
}

#[test]
fn selector_on_common_algorithm_is_a_usage_error() {
    let out = anonpram(&["run", "--algo", "com-bnd-lv", "--selector", "first", "--n", "8", "--trials", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn bad_flags_are_usage_errors() {
    for args in [
        &["run", "--algo", "nope", "--n", "8", "--trials", "1", "--seed", "1"][..],
        &["run", "--algo", "arb-bnd-lv", "--n", "8", "--trials", "1"],
        &["run", "--algo", "arb-bnd-lv", "--n", "8", "--trials", "0", "--seed", "1"],
        &["run", "--algo", "arb-bnd-lv", "--n", "0", "--trials", "1", "--seed", "1"],
        &["run", "--algo", "arb-unb-mc", "--n", "8", "--trials", "1", "--seed", "1", "--growth", "triple"],
        &["run", "--algo", "arb-bnd-lv", "--n", "8", "--trials", "1", "--seed", "1", "--beta", "-1"],
        &["sweep", "--algo", "all", "--n", "8", "--trials", "1", "--seed", "1", "--beta", "0"],
        &["frobnicate"],
    ] {
        let out = anonpram(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn out_directory_gets_csv_and_json_and_runs_repeat_exactly() {
    let dir = std::env::temp_dir().join(format!("anonpram-cli-{}", std::process::id()));
    let mut previous = None;
    for jobs in ["1", "2"] {
        let out = anonpram(&[
            "run", "--algo", "com-unb-mc", "--n", "8,16", "--trials", "5", "--seed", "3", "--growth", "successor", "--jobs", jobs,
            "--out", dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let csv = std::fs::read_to_string(dir.join("trials.csv")).unwrap();
        let json = std::fs::read_to_string(dir.join("aggregate.json")).unwrap();
        assert_eq!(csv.lines().count(), 11);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value[0]["config"]["algorithm"], "com-unb-mc");
        assert_eq!(value[0]["aggregates"].as_array().unwrap().len(), 2);
        if let Some(prev) = previous.replace((csv.clone(), json.clone())) {
            assert_eq!(prev, (csv, json));
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_covers_every_algorithm() {
    let out = anonpram(&["sweep", "--algo", "all", "--n", "4", "--trials", "2", "--seed", "5", "--selector", "last"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let ids: BTreeSet<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids.len(), 8);
}

#[test]
fn suite_reports_per_criterion() {
    let out = anonpram(&["suite", "--only", "2,14"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains(" PASS: ")));
}

#[test]
fn suite_failure_exits_one() {
    let out = anonpram(&["suite", "--only", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("criterion  8 FAIL"));
}

fn long_flags(help: &str) -> BTreeSet<String> {
    help.split(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
        .filter(|w| w.starts_with("--") && w.len() > 2)
        .map(str::to_string)
        .collect()
}

#[test]
fn help_lists_exactly_the_accepted_flags() {
    let expected: [(&str, &[&str]); 3] = [
        (
            "run",
            &["--algo", "--beta", "--n", "--trials", "--seed", "--growth", "--selector", "--cap-multiplier", "--lenient", "--out", "--jobs"],
        ),
        (
            "sweep",
            &["--algo", "--beta", "--n", "--trials", "--seed", "--growth", "--selector", "--cap-multiplier", "--lenient", "--out", "--jobs"],
        ),
        ("suite", &["--seed", "--only", "--jobs"]),
    ];
    for (sub, flags) in expected {
        let help = stdout(&anonpram(&[sub, "--help"]));
        let mut want: BTreeSet<String> = flags.iter().map(|f| f.to_string()).collect();
        want.insert("--help".into());
        assert_eq!(long_flags(&help), want, "{sub}");
    }
    let help = stdout(&anonpram(&["--help"]));
    for sub in ["run", "sweep", "suite", "list"] {
        assert!(help.contains(sub));
    }
    assert!(stdout(&anonpram(&["run", "--help"])).contains("ANONPRAM_JOBS"));
}

#[test]
fn jobs_fall_back_to_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_anonpram"))
        .args(["run", "--algo", "arb-bnd-lv", "--n", "4", "--trials", "3", "--seed", "2"])
        .env("ANONPRAM_JOBS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_anonpram"))
        .args(["run", "--algo", "arb-bnd-lv", "--n", "4", "--trials", "3", "--seed", "2"])
        .env("ANONPRAM_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
