use std::path::PathBuf;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tourney_core::{to_compact, Tournament};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn tourney(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tourney"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

#[test]
fn eval_double_cycle_is_flat() {
    let path = fixture("dbl6.trn");
    let out = tourney(&[
        "eval",
        "--rule",
        "significant-only",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let probs = v["probs"].as_array().unwrap();
    assert_eq!(probs.len(), 6);
    assert!(probs.iter().all(|p| p == "1/6"));
}

#[test]
fn eval_bracket_on_three_cycle() {
    let path = fixture("cycle3.trn");
    let out = tourney(&[
        "eval",
        "--rule",
        "rdseb:3",
        "--input",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(
        text.lines().filter(|l| l.contains("\t1/3\t")).count(),
        3,
        "{text}"
    );
}

#[test]
fn eval_rejects_small_significant_only() {
    let path = fixture("cycle3.trn");
    let out = tourney(&[
        "eval",
        "--rule",
        "significant-only",
        "--input",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rule undefined below 6 teams"));
}

#[test]
fn eval_reports_parse_errors() {
    let out = tourney(&["eval", "--rule", "uniform", "--compact", "3:zz"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tourney(&["eval", "--rule", "no-such-rule", "--compact", "3:5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_are_rejected() {
    assert_eq!(tourney(&["bounds", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        tourney(&["eval", "--rule", "uniform"]).status.code(),
        Some(2)
    );
}

#[test]
fn audit_exit_codes_follow_assert_alpha() {
    let base = [
        "audit",
        "--rule",
        "significant-only",
        "--n",
        "6",
        "--k",
        "3",
        "--mode",
        "exhaustive",
        "--format",
        "json",
    ];
    let held = tourney(&[&base[..], &["--assert-alpha", "1/2"]].concat());
    assert_eq!(held.status.code(), Some(0));
    let report = json(&held);
    assert_eq!(report["alpha_observed"]["rational"], "1/2");
    assert_eq!(report["mode"], "exhaustive");
    assert_eq!(report["witness"]["coalition"].as_array().unwrap().len(), 3);
    assert!(report.get("wall_time_ms").is_none());

    let failed = tourney(&[
        "audit",
        "--rule",
        "significant-only",
        "--n",
        "6",
        "--k",
        "3",
        "--assert-alpha",
        "49/100",
    ]);
    assert_eq!(failed.status.code(), Some(1));

    let bracket = tourney(&[
        "audit",
        "--rule",
        "rdseb:2",
        "--n",
        "4",
        "--k",
        "2",
        "--mode",
        "exhaustive",
        "--assert-alpha",
        "1/3",
    ]);
    assert_eq!(bracket.status.code(), Some(0));
}

#[test]
fn exhaustive_audit_output_is_byte_identical() {
    let args = [
        "audit", "--rule", "rdseb:2", "--n", "4", "--k", "2", "--format", "json",
    ];
    let a = tourney(&[&args[..], &["--threads", "1"]].concat());
    let b = tourney(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let timed = tourney(&[&args[..], &["--timing"]].concat());
    assert!(json(&timed)["wall_time_ms"].is_u64());
}

#[test]
fn sampled_audit_needs_seed() {
    let args = [
        "audit",
        "--rule",
        "rdseb:3",
        "--n",
        "9",
        "--k",
        "3",
        "--mode",
        "sampled",
        "--scenarios",
        "20",
    ];
    assert_eq!(tourney(&args).status.code(), Some(2));
    let out = tourney(&[&args[..], &["--seed", "5", "--format", "json"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["seed"], 5);
    assert!(v["coverage"]["epsilon"].is_f64());
}

#[test]
fn property_audits() {
    let ok = tourney(&[
        "audit",
        "--rule",
        "significant-only",
        "--n",
        "6",
        "--property",
        "monotone",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let cc = tourney(&[
        "audit",
        "--rule",
        "uniform",
        "--n",
        "4",
        "--property",
        "cc",
        "--format",
        "json",
    ]);
    assert_eq!(cc.status.code(), Some(1));
    assert_eq!(json(&cc)["violation"]["observed"], "1/4");
}

#[test]
fn bounds_table_cells() {
    let out = tourney(&["bounds", "--d-max", "7", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let cell = |d: u64, k: u64| {
        v["cells"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["d"] == d && c["k"] == k)
            .cloned()
            .unwrap()
    };
    assert_eq!(cell(3, 3)["decimal"], "0.8519");
    assert_eq!(cell(3, 3)["rational"], "23/27");
    assert_eq!(cell(6, 4)["decimal"], "0.9074");
    assert_eq!(cell(7, 5)["decimal"], "0.9572");
    assert_eq!(v["cells"].as_array().unwrap().len(), 15);
    assert_eq!(tourney(&["bounds", "--d-max", "2"]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = tourney(&[
            "gen",
            "--n",
            "7",
            "--count",
            "3",
            "--seed",
            "11",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    for i in 0..3 {
        let name = format!("t{i:04}.trn");
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y);
        let t = tourney_core::parse_text(std::str::from_utf8(&x).unwrap()).unwrap();
        assert_eq!(t.n(), 7);
    }
    let no_seed = tourney(&["gen", "--n", "7", "--out-dir", a.path().to_str().unwrap()]);
    assert_eq!(no_seed.status.code(), Some(2));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.csv");
    let out = tourney(&[
        "bounds",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(path).unwrap();
    assert!(csv.starts_with("d,k,rational,decimal\n"));
    assert!(csv.contains("3,3,23/27,0.8519"));
}

#[test]
fn sample_bracket_frequencies_within_three_sigma() {
    let path = fixture("cycle3.trn");
    let draws = 300_000u64;
    let out = tourney(&[
        "sample",
        "--rule",
        "rdseb:3",
        "--input",
        path.to_str().unwrap(),
        "--samples",
        &draws.to_string(),
        "--seed",
        "2024",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let p = 1.0 / 3.0;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for c in v["counts"].as_array().unwrap() {
        let c = c.as_u64().unwrap() as f64;
        assert!((c - draws as f64 * p).abs() < 3.0 * sigma, "{v}");
    }
    assert_eq!(v["exact"], serde_json::json!(["1/3", "1/3", "1/3"]));
}

#[test]
fn sample_extension_stays_in_top_cycle() {
    let t = Tournament::random(36, &mut ChaCha8Rng::seed_from_u64(36)).unwrap();
    let compact = to_compact(&t);
    let out = tourney(&[
        "sample",
        "--rule",
        "ext:significant-only:6",
        "--compact",
        &compact,
        "--samples",
        "5000",
        "--seed",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["outside_top_cycle"], 0);
    assert_eq!(v["dummy_wins"], 0);
    assert!(v["exact"].is_null());
}

#[test]
fn inspect_double_cycle() {
    let path = fixture("dbl6.trn");
    let out = tourney(&[
        "inspect",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["diagnostics"]["significant_count"], 6);
    assert_eq!(v["diagnostics"]["class"]["kind"], "near-condorcet");
}
