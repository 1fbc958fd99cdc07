use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nkgeom_cli::ScenarioConfig;

fn nkgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nkgeom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = golden("s6.conf");
    let out = dir.path().join("run.txt");
    let mut reports = Vec::new();
    for _ in 0..2 {
        let status = nkgeom(&[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            status.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        let text = std::fs::read(&out).unwrap();
        let json = std::fs::read(dir.path().join("run.txt.json")).unwrap();
        assert_eq!(text, status.stdout);
        std::fs::remove_file(&out).unwrap();
        reports.push((text, json));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn s6_report_matches_golden() {
    let out = nkgeom(&["verify", "--config", golden("s6.conf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let expected = std::fs::read_to_string(golden("s6.report")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn json_config_echo_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.txt");
    nkgeom(&[
        "verify",
        "--model",
        "cpn",
        "--n",
        "2",
        "--c",
        "2.5",
        "--seed",
        "3",
        "--samples",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.txt.json")).unwrap())
            .unwrap();
    let config = ScenarioConfig::parse(json["config"].as_str().unwrap()).unwrap();
    assert_eq!(
        (config.n, config.c, config.seed, config.samples),
        (2, 2.5, 3, 20)
    );
    assert_eq!(config.report_path.as_deref(), Some(out.as_path()));
    assert_eq!(json["seed"], 3);
}

#[test]
fn unknown_model_is_a_usage_error_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.txt");
    let result = nkgeom(&["verify", "--model", "torus", "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("unknown model"));
    assert!(result.stdout.is_empty());
    assert!(!out.exists());
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    std::fs::write(&config, "model = s6\nflavour = strange\n").unwrap();
    let result = nkgeom(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("unknown key `flavour`"));
}

#[test]
fn unwritable_report_path_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("r.txt");
    let result = nkgeom(&["verify", "--model", "cn", "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("cannot write report"));
}

#[test]
fn tolerance_below_round_off_fails() {
    let result = nkgeom(&[
        "verify",
        "--model",
        "s6",
        "--tol",
        "1e-30",
        "--samples",
        "20",
    ]);
    assert_eq!(result.status.code(), Some(1));
    let text = String::from_utf8(result.stdout).unwrap();
    assert!(text.lines().any(|l| l.contains(" FAIL ")));
    assert!(text.lines().last().unwrap().starts_with("SUMMARY"));
}

#[test]
fn unavailable_check_fails_loudly() {
    let result = nkgeom(&["verify", "--model", "product", "--samples", "20"]);
    assert_eq!(result.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("p.conf");
    std::fs::write(&config, "model = product\nchecks = schur\n").unwrap();
    let result = nkgeom(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stdout).contains("CHECK schur.error FAIL defect=inf"));
    assert!(String::from_utf8_lossy(&result.stderr).contains("has no chart"));
}

#[test]
fn classify_and_range_subcommands() {
    let result = nkgeom(&["classify", "--model", "cdn", "--c", "-2", "--samples", "50"]);
    assert_eq!(result.status.code(), Some(0));
    let text = String::from_utf8(result.stdout).unwrap();
    assert!(text.starts_with("label=CDn\n"));
    assert!(text.contains("nu=-5.0000000000000000e-1"));

    let result = nkgeom(&["classify", "--model", "cpn", "--n", "2"]);
    assert_eq!(result.status.code(), Some(2));

    let result = nkgeom(&["range", "--model", "s6", "--samples", "50"]);
    assert_eq!(result.status.code(), Some(0));
    let text = String::from_utf8(result.stdout).unwrap();
    for line in text.lines() {
        let value: f64 = line.split('=').nth(1).unwrap().parse().unwrap();
        assert!((value - 1.0).abs() < 1e-8, "{line}");
    }
}

#[test]
fn report_schema_prints_formats() {
    let result = nkgeom(&["report-schema"]);
    assert_eq!(result.status.code(), Some(0));
    let text = String::from_utf8(result.stdout).unwrap();
    assert!(text.contains("CHECK <id> <PASS|FAIL>"));
    assert!(text.contains("SUMMARY pass=<k> fail=<m> seed=<seed>"));
}

#[test]
fn flags_without_model_are_rejected() {
    assert_eq!(nkgeom(&["verify", "--n", "3"]).status.code(), Some(2));
    assert_eq!(nkgeom(&["frobnicate"]).status.code(), Some(2));
}
