//! End-to-end tests of the binary: exit codes, report shapes and SVG output.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_conductor-lab"))
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("conductor-lab-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn swan_command_exits_zero_and_prints_report() {
    let out = Command::new(bin())
        .args(["swan", "--scenario"])
        .arg(corpus().join("as-p3-n2.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["scenario"], "as-p3-n2");
    assert_eq!(report["status"], "pass");
    // sw = 2t on [1/10, 3] for the nontrivial characters
    let sw = &report["characters"][1]["sw_fun"];
    assert_eq!(sw["values"][1], "6/1");
}

#[test]
fn swan_rejects_monic_kind() {
    let out = Command::new(bin())
        .args(["swan", "--scenario"])
        .arg(corpus().join("monic-trivial.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("abelian"));
}

#[test]
fn missing_scenario_is_exit_3() {
    let out = Command::new(bin())
        .args(["swan", "--scenario", "/nonexistent.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn discriminant_command_emits_svg() {
    let dir = tmp_dir("disc-svg");
    let out = Command::new(bin())
        .args(["discriminant", "--scenario"])
        .arg(corpus().join("as-p2-breakpoint.toml"))
        .args(["--svg", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.join("as-p2-breakpoint-discriminant.svg")).unwrap();
    assert!(svg.contains("<polyline"));
    let json = std::fs::read_to_string(dir.join("as-p2-breakpoint-discriminant.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&json).unwrap();
    // discriminant = (p-1) * break = max(t, 3t - 2) over [0, 2]
    assert_eq!(report["discriminant"]["breakpoints"][1], "1/1");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn decompose_command_reports_pieces() {
    let out = Command::new(bin())
        .args(["decompose", "--scenario"])
        .arg(corpus().join("as-p3-three-monomials.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let pieces = report["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), 3);
}

#[test]
fn zeros_fuzz_is_seed_reproducible() {
    let run = |seed: &str| {
        let out = Command::new(bin())
            .args(["zeros", "--fuzz", "25"])
            .env("CONDUCTOR_LAB_SEED", seed)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run("99");
    let b = run("99");
    let c = run("100");
    assert_eq!(a, b, "same seed must reproduce the same cases");
    assert_ne!(a, c, "different seeds should differ");
}

#[test]
fn zeros_document_mode() {
    let dir = tmp_dir("zeros-doc");
    let doc = r#"
id = "zeros-demo"
q = 5
interval = ["1/2", "3"]

[poly]
"0" = "pi^3"
"1" = "-pi - pi^2"
"2" = "1"
"#;
    let path = dir.join("zeros.toml");
    std::fs::write(&path, doc).unwrap();
    let out = Command::new(bin())
        .args(["zeros", "--scenario"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // (xi - pi)(xi - pi^2) has both zeros inside [1/2, 3]
    assert_eq!(report["zero_cases"][0]["lhs"], 2);
    assert_eq!(report["zero_cases"][0]["ok"], true);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn corpus_flags_corrupted_file_with_exit_3() {
    let dir = tmp_dir("corrupt");
    std::fs::copy(
        corpus().join("kummer-m2-q3.toml"),
        dir.join("kummer-m2-q3.toml"),
    )
    .unwrap();
    std::fs::write(dir.join("broken.toml"), "this is not a scenario").unwrap();
    let out = Command::new(bin()).arg("corpus").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("broken"), "failure must name the file: {stdout}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn corpus_rejects_duplicate_ids() {
    let dir = tmp_dir("dup-ids");
    std::fs::copy(corpus().join("as-p2-n1.toml"), dir.join("as-p2-n1.toml")).unwrap();
    std::fs::copy(corpus().join("as-p2-n1.toml"), dir.join("copy-of-n1.toml")).unwrap();
    let out = Command::new(bin()).arg("corpus").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("duplicate id"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn corpus_empty_dir_warns_and_passes() {
    let dir = tmp_dir("empty");
    let out = Command::new(bin()).arg("corpus").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn corpus_writes_junit_summary() {
    let dir = tmp_dir("junit");
    std::fs::copy(corpus().join("as-p2-n1.toml"), dir.join("as-p2-n1.toml")).unwrap();
    let out_dir = tmp_dir("junit-out");
    let out = Command::new(bin())
        .arg("corpus")
        .arg(&dir)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let xml = std::fs::read_to_string(out_dir.join("corpus-junit.xml")).unwrap();
    assert!(xml.contains(r#"<testsuite name="conductor-lab corpus" tests="1" failures="0">"#));
    assert!(std::fs::metadata(out_dir.join("as-p2-n1.json")).is_ok());
    let _ = std::fs::remove_dir_all(&dir);
    let _ = std::fs::remove_dir_all(&out_dir);
}

#[test]
fn inline_expected_fragment_checked() {
    let dir = tmp_dir("inline-expected");
    // sw = 3t on [1/10, 3] for every nontrivial character
    let good = r#"
id = "inline-good"
q = 2
interval = ["1/10", "3"]

[cover]
kind = "artin-schreier"
g = { "-3" = "1" }

[expected]
sw_json = '{"domain":["1/10","3/1"],"breakpoints":["1/10","3/1"],"values":["3/10","9/1"]}'
"#
    .to_string();
    let path = dir.join("good.toml");
    std::fs::write(&path, &good).unwrap();
    let out = Command::new(bin())
        .args(["swan", "--scenario"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let bad = good.replace("\"9/1\"", "\"7/1\"");
    let path_bad = dir.join("bad.toml");
    std::fs::write(&path_bad, &bad).unwrap();
    let out = Command::new(bin())
        .args(["swan", "--scenario"])
        .arg(&path_bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("golden-sw"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn json_scenario_mirror_accepted() {
    let dir = tmp_dir("json-mirror");
    let doc = serde_json::json!({
        "id": "json-mirror",
        "q": 3,
        "e": 1,
        "interval": ["1/10", "3"],
        "cover": { "kind": "artin-schreier", "g": { "-2": "1" } },
    });
    let path = dir.join("scenario.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let out = Command::new(bin())
        .args(["swan", "--scenario"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["scenario"], "json-mirror");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn golden_regression_detected() {
    let dir = tmp_dir("golden-reg");
    std::fs::copy(corpus().join("as-p2-n1.toml"), dir.join("as-p2-n1.toml")).unwrap();
    std::fs::create_dir_all(dir.join("golden")).unwrap();
    std::fs::write(dir.join("golden/as-p2-n1.json"), "{\"stale\": true}\n").unwrap();
    let out = Command::new(bin()).arg("corpus").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("differs from golden"));
    let _ = std::fs::remove_dir_all(&dir);
}
