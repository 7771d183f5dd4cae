//! End-to-end checks of the `abft` binary: exit codes, output formats, seed
//! handling, and the codec round trip through hex.

use std::path::PathBuf;
use std::process::{Command, Output};

fn abft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abft"))
        .args(args)
        .env_remove("ABFT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("abft-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn missing_config_file_exits_2() {
    let out = abft(&["simulate", "--config", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn simulate_requires_preset_or_config() {
    let out = abft(&["simulate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_keys_exit_2() {
    let path = temp_path("bad-config.json");
    std::fs::write(
        &path,
        r#"{"scheme":"legacy80211ad","layout":{"abft_length":8,"e_abft_length":0,"fss":16},
           "n_dmg":4,"n_edmg":0,"population_mode":"one_shot","n_bi":1,"trials":10,
           "master_seed":1,"bogus":42}"#,
    )
    .unwrap();
    let out = abft(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn config_scenario_emits_csv_with_summary() {
    let path = temp_path("good-config.json");
    std::fs::write(
        &path,
        r#"{"scheme":"sa_bft","layout":{"abft_length":8,"e_abft_length":8,"fss":16},
           "n_dmg":0,"n_edmg":16,"population_mode":"one_shot","n_bi":1,"trials":500,
           "master_seed":3}"#,
    )
    .unwrap();
    let out = abft(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    assert!(body.starts_with("x,metric,mean,ci95,trials"));
    assert!(body.contains("16,successes,"));
    assert!(stderr(&out).contains("x=16 successes mean="));
}

#[test]
fn preset_runs_are_byte_identical_per_seed() {
    let first = temp_path("fig15-first.csv");
    let second = temp_path("fig15-second.csv");
    for path in [&first, &second] {
        let out = abft(&[
            "simulate",
            "--preset",
            "fig15",
            "--trials",
            "400",
            "--seed",
            "11",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );

    // A different seed moves the samples.
    let third = temp_path("fig15-third.csv");
    let out = abft(&[
        "simulate",
        "--preset",
        "fig15",
        "--trials",
        "400",
        "--seed",
        "12",
        "--out",
        third.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&third).unwrap()
    );
}

#[test]
fn seed_env_fallback_matches_flag() {
    let via_flag = temp_path("seed-flag.csv");
    let via_env = temp_path("seed-env.csv");
    let out = abft(&[
        "simulate",
        "--preset",
        "fig15",
        "--trials",
        "300",
        "--seed",
        "77",
        "--out",
        via_flag.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_abft"))
        .args([
            "simulate",
            "--preset",
            "fig15",
            "--trials",
            "300",
            "--out",
            via_env.to_str().unwrap(),
        ])
        .env("ABFT_SEED", "77")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&via_flag).unwrap(),
        std::fs::read(&via_env).unwrap()
    );
}

#[test]
fn fig5_preset_sweeps_the_full_population_range() {
    let out = abft(&[
        "simulate",
        "--preset",
        "fig5",
        "--trials",
        "50",
        "--seed",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), "x,metric,mean,ci95,trials");
    let rows: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
    assert_eq!(rows.len(), 30, "one mean-successes row per N in 1..=30");
    for (idx, row) in rows.iter().enumerate() {
        assert!(
            row.starts_with(&format!("{},successes/legacy,", idx + 1)),
            "{row}"
        );
    }
}

#[test]
fn json_format_mirrors_the_csv_fields() {
    let out = abft(&[
        "simulate",
        "--preset",
        "fig15",
        "--trials",
        "200",
        "--seed",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let point = &parsed["points"][0];
    for field in ["x", "metric", "mean", "ci95", "trials"] {
        assert!(!point[field].is_null(), "missing {field}");
    }
}

#[test]
fn analyze_single_contender_is_certain() {
    let out = abft(&["analyze", "--p", "1.0", "--m", "3", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["p_e"].as_f64().unwrap(), 1.0);
}

#[test]
fn analyze_reports_residual_below_tolerance() {
    let out = abft(&["analyze", "--p", "1.0", "--m", "3", "--s", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(parsed["residual"].as_f64().unwrap() < 1e-10);
    assert!(stderr(&out).contains("residual="));
}

#[test]
fn analyze_range_error_exits_2() {
    let out = abft(&["analyze", "--p", "1.0", "--m", "9", "--s", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("m = 9"));
}

#[test]
fn analyze_exhausted_iterations_exit_3_with_last_iterate() {
    let out = abft(&[
        "analyze", "--p", "1.0", "--m", "3", "--s", "30", "--max-iter", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("did not converge"), "{err}");
    assert!(err.contains("last pe"), "{err}");
}

#[test]
fn optimize_prints_five_rows_and_round_trips_json() {
    let out = abft(&["optimize-m", "--s", "0.5", "--p", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let table = stdout(&out);
    assert_eq!(table.lines().count(), 7, "{table}");
    assert!(table.contains(">  1"), "picks m=1 under light load: {table}");

    let json_out = abft(&["optimize-m", "--s", "0.5", "--p", "1.0", "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json_out)).unwrap();
    assert_eq!(parsed["chosen_m"].as_u64(), Some(1));
    let col: Vec<f64> = parsed["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["n_slot"].as_f64().unwrap())
        .collect();
    assert_eq!(col, vec![15.0, 14.0, 13.0, 11.0, 6.0]);
}

#[test]
fn codec_round_trips_through_hex() {
    let enc = abft(&[
        "codec",
        "encode",
        "--abft-length",
        "8",
        "--fss",
        "16",
        "--e-abft-length",
        "8",
    ]);
    assert_eq!(enc.status.code(), Some(0));
    let hex = stdout(&enc).trim().to_string();
    assert_eq!(hex.len(), 12);

    let dec = abft(&["codec", "decode", &hex]);
    assert_eq!(dec.status.code(), Some(0));
    let body = stdout(&dec);
    assert!(body.contains("abft_length = 8"));
    assert!(body.contains("fss = 16"));
    assert!(body.contains("oi = 0"));
    assert!(body.contains("e_abft_length = 8"));
    assert!(body.contains("next_ati_start = 16 slots (4096 us)"));
}

#[test]
fn codec_odd_hex_exits_2() {
    let out = abft(&["codec", "decode", "abc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("odd length"));
}

#[test]
fn codec_out_of_range_field_exits_2() {
    let out = abft(&[
        "codec",
        "encode",
        "--abft-length",
        "9",
        "--fss",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn closed_stdout_pipe_exits_cleanly() {
    use std::process::Stdio;

    // A scenario with retained samples emits far more than a pipe buffer.
    let path = temp_path("pipe-config.json");
    std::fs::write(
        &path,
        r#"{"scheme":"legacy80211ad","layout":{"abft_length":8,"e_abft_length":0,"fss":16},
           "n_dmg":10,"n_edmg":0,"population_mode":"one_shot","n_bi":1,"trials":50000,
           "master_seed":3,"retain_samples":true}"#,
    )
    .unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_abft"))
        .args([
            "simulate",
            "--config",
            path.to_str().unwrap(),
            "--format",
            "json",
        ])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    drop(child.stdout.take());
    let status = child.wait().unwrap();
    assert_eq!(status.code(), Some(0), "broken pipe must not panic");
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = abft(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    let out = abft(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("simulate"));
}
