use std::process::{Command, Output};

fn mapgenus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapgenus"))
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn small_table_csv() {
    let out = mapgenus(&["table", "--max-n", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "n,g,C\n1,0,4\n1,1,1\n2,0,32\n2,1,28\n");
    // progress goes to stderr only
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2/2"));
}

#[test]
fn zero_max_n_is_a_usage_error() {
    let out = mapgenus(&["table", "--max-n", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn json_counts_are_strings() {
    let out = mapgenus(&["table", "--max-n", "12", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["max_n"], 12);
    assert_eq!(v["counts"][1], serde_json::json!(["32", "28"]));
    assert!(v["counts"][11][0].is_string());
}

#[test]
fn resumed_build_matches_uninterrupted() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("table.ckpt");
    let ckpt = ckpt.to_str().unwrap();
    let first = mapgenus(&["table", "--max-n", "25", "--checkpoint", ckpt, "--stride", "5"]);
    assert!(first.status.success());
    let resumed = mapgenus(&["table", "--max-n", "60", "--checkpoint", ckpt, "--stride", "5"]);
    assert!(resumed.status.success());
    assert!(!String::from_utf8_lossy(&resumed.stderr).contains("row 10/"));
    let fresh = mapgenus(&["table", "--max-n", "60"]);
    assert_eq!(stdout(&resumed), stdout(&fresh));
    // rerun is idempotent
    let again = mapgenus(&["table", "--max-n", "60", "--checkpoint", ckpt]);
    assert_eq!(stdout(&again), stdout(&fresh));
}

#[test]
fn corrupt_checkpoint_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("bad.ckpt");
    std::fs::write(&ckpt, "not a checkpoint\n").unwrap();
    let out = mapgenus(&["table", "--max-n", "5", "--checkpoint", ckpt.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrupt"));
}

#[test]
fn worker_count_does_not_change_results() {
    let one = mapgenus(&["table", "--max-n", "50", "--workers", "1"]);
    let four = mapgenus(&["table", "--max-n", "50", "--workers", "4"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn verify_default_run_passes() {
    let out = mapgenus(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for line in [
        "cubic aggregate n≤30: PASS",
        "brute-force oracle n_edges≤4: PASS",
        "Lemma1 bounds n≤1000: PASS",
    ] {
        assert!(text.contains(line), "missing {line:?} in\n{text}");
    }
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_json_report() {
    let out = mapgenus(&["verify", "--n", "50", "--N", "2000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v.as_array().unwrap();
    assert!(checks.len() >= 6);
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn k_estimate_at_one() {
    let out = mapgenus(&["kestimate", "--y", "1.0", "--N", "100000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let value: f64 = row[3].parse().unwrap();
    assert!((value - 9.0 / std::f64::consts::PI).abs() < 1e-3);
}

#[test]
fn k_estimate_domain_error() {
    let out = mapgenus(&["kestimate", "--y", "2.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside"));
}

#[test]
fn doubling_n_halves_the_error_indicator() {
    let indicator = |n: &str| -> f64 {
        let out = mapgenus(&["kestimate", "--y", "1.0", "--N", n]);
        stdout(&out)
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(4)
            .unwrap()
            .parse()
            .unwrap()
    };
    let ratio = indicator("40000") / indicator("20000");
    assert!((ratio - 0.5).abs() < 0.05, "{ratio}");
}

#[test]
fn stats_first_row() {
    let out = mapgenus(&["stats", "--max-n", "2", "--n", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..5], ["1", "1/5", "0.2", "4/25", "0.16"]);
}

#[test]
fn stats_ratio_schema() {
    let out = mapgenus(&["stats", "--max-n", "80", "--n", "80", "--kind", "ratios", "--N", "5000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,g,u,exact,asym,ratio");
    let rows: Vec<_> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.starts_with("80,")));
}

#[test]
fn stats_normality_per_n() {
    let out = mapgenus(&["stats", "--max-n", "60", "--n", "20,40,60", "--kind", "normality"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "n,centred_sup,exact_sup,ks");
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn bad_epsilon_is_a_usage_error() {
    let out = mapgenus(&["stats", "--max-n", "10", "--kind", "ratios", "--epsilon", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn count_all_maps() {
    let out = mapgenus(&["count", "--max-n", "3"]);
    let text = stdout(&out);
    let exact: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(exact[..2], ["2", "10"]);
    let bad = mapgenus(&["count", "--family", "3", "--max-n", "3"]);
    assert!(bad.status.success(), "odd degree with size parameter is valid");
    assert_eq!(mapgenus(&["count", "--family", "wheel"]).status.code(), Some(2));
}

#[test]
fn environment_and_flag_precedence() {
    let run = |env_max: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_mapgenus"))
            .args(args)
            .env_clear()
            .env("MAPGENUS_MAX_N", env_max)
            .output()
            .unwrap()
    };
    let from_env = run("1", &["table"]);
    assert_eq!(stdout(&from_env), "n,g,C\n1,0,4\n1,1,1\n");
    let flag_wins = run("1", &["table", "--max-n", "2"]);
    assert_eq!(stdout(&flag_wins).lines().count(), 5);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = mapgenus(&["table", "--max-n", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(path).unwrap().starts_with("n,g,C\n1,0,4"));
}
