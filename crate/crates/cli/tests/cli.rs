//! End-to-end checks of the `tile` binary: output formats, exit codes, and
//! agreement with the library the subcommands wrap.

use std::process::{Command, Output};

use tiling_core::classify::{self, ClassifyConfig, JsonReport};
use tiling_core::fillout;
use tiling_core::zset::ResidueSet;

fn tile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tile"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn cyclo_prints_polynomial() {
    let out = tile(&["cyclo", "12"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1 - X^2 + X^4");
}

#[test]
fn sig_prints_divisor_list() {
    let out = tile(&["sig", "144", "0,32,58,90,112,122"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "3,4,6,12,24,36,48");
}

#[test]
fn cm_reports_json_and_strict_exit() {
    let out = tile(&["cm", "0,1,2,5,6,7"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(value["verdict"], "DoesNotTile");
    assert_eq!(value["t1"], true);
    assert_eq!(value["t2"], false);
    assert_eq!(value["spectrum"], serde_json::json!([2, 3]));

    let out = tile(&["cm", "0,1,2,5,6,7", "--strict"]);
    assert_eq!(out.status.code(), Some(2));

    let out = tile(&["cm", "0,1,2,3", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_strict_exit_codes() {
    let t1 = "0,18,28,44,54,64,80,82,98,108,118,134";
    let t2 = "0,33,40,45,48,57,88,96,105,117,129,136";
    let s1 = "0,16,30,44,58,74,80,94,108,110,124,138";
    let s2 = "0,27,30,35,60,72,75,83,102,123,131,132";

    let out = tile(&["verify", "144", t1, t2, "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "TILING");

    let out = tile(&["verify", "144", s1, s2, "--strict"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out).trim(), "NOT A TILING");
}

#[test]
fn fillout_matches_library() {
    let out = tile(&["fillout", "36", "0,4,8,9,13,17"]);
    assert!(out.status.success());
    let printed: Vec<String> = stdout(&out).lines().map(str::to_owned).collect();

    let a = ResidueSet::from_members(36, &[0, 4, 8, 9, 13, 17]).unwrap();
    let expected: Vec<String> = fillout::explore(&a)
        .unwrap()
        .iter()
        .map(|b| {
            b.members()
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    assert_eq!(printed, expected);
}

#[test]
fn classify_json_round_trips() {
    let path = std::env::temp_dir().join("tile-classify-12.json");
    let out = tile(&["classify", "12", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("Z_12: 4 partitions"));

    let text = std::fs::read_to_string(&path).expect("report written");
    let from_cli: JsonReport = serde_json::from_str(&text).expect("valid report JSON");
    let direct = classify::classify(12, &ClassifyConfig::for_modulus(12)).unwrap();
    assert_eq!(from_cli, JsonReport::from(&direct));
    std::fs::remove_file(&path).ok();
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tile(&["cyclo", "twelve"]).status.code(), Some(1));
    assert_eq!(tile(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(tile(&["sig", "12", "3,2,1"]).status.code(), Some(1));
    assert_eq!(tile(&["verify", "12", "0,1"]).status.code(), Some(1));
    // Internal domain errors surface the same way.
    assert_eq!(tile(&["sig", "12", "0,99"]).status.code(), Some(1));
    assert_eq!(tile(&["lowerbound", "4", "11"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = tile(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("classify"));
}
