//! End-to-end tests of the `featrec` binary: every subcommand, the exit-code
//! contract, and the generate -> recognize -> evaluate pipeline.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn featrec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_featrec"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_success(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed (exit {:?}):\n{}",
        out.status.code(),
        stderr(out)
    );
}

#[test]
fn pipeline_generate_recognize_evaluate() {
    let tmp = TempDir::new().expect("temp dir");
    let dir = tmp.path();

    let out = featrec(
        &[
            "generate",
            "--feature",
            "counterbore_hole",
            "--param",
            "bore_radius=6",
            "--param",
            "hole_radius=3",
            "--out",
            "model.json",
            "--truth",
            "truth.json",
        ],
        dir,
    );
    assert_success(&out, "generate");
    assert!(dir.join("model.json").is_file());
    assert!(dir.join("truth.json").is_file());

    let out = featrec(
        &["recognize", "--model", "model.json", "--out", "pred.json"],
        dir,
    );
    assert_success(&out, "recognize");
    let pred: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("pred.json")).unwrap())
            .expect("recognition output is JSON");
    assert!(pred.get("faces").is_some(), "result has a faces section");
    assert!(
        pred["instances"]
            .as_array()
            .unwrap()
            .iter()
            .any(|i| i["feature"] == "counterbore_hole"),
        "counterbore instance present: {pred}"
    );

    let out = featrec(
        &[
            "evaluate",
            "--pred",
            "pred.json",
            "--truth",
            "truth.json",
            "--csv",
            "confusion.csv",
        ],
        dir,
    );
    assert_success(&out, "evaluate");
    let report: serde_json::Value =
        serde_json::from_str(&stdout(&out)).expect("evaluate prints JSON");
    for metric in ["precision", "recall", "accuracy", "f1"] {
        assert_eq!(
            report["macro"][metric], 1.0,
            "macro {metric} in {report}"
        );
    }
    let csv = std::fs::read_to_string(dir.join("confusion.csv")).expect("csv written");
    assert!(csv.starts_with("truth,"), "csv header: {csv}");
}

#[test]
fn step_ingestion_matches_json_source() {
    let tmp = TempDir::new().expect("temp dir");
    let dir = tmp.path();

    let out = featrec(
        &[
            "generate",
            "--feature",
            "simple_hole",
            "--out",
            "model.json",
            "--step",
            "model.step",
        ],
        dir,
    );
    assert_success(&out, "generate with STEP output");

    let out = featrec(
        &["ingest-step", "--in", "model.step", "--out", "ingested.json"],
        dir,
    );
    assert_success(&out, "ingest-step");
    assert!(
        stderr(&out).is_empty(),
        "no warnings expected: {}",
        stderr(&out)
    );

    // Recognition over the ingested model matches the JSON-sourced one.
    let a = featrec(&["recognize", "--model", "model.json"], dir);
    let b = featrec(&["recognize", "--model", "ingested.json"], dir);
    assert_success(&a, "recognize JSON model");
    assert_success(&b, "recognize ingested model");
    let id_free = |text: &str| {
        let v: serde_json::Value = serde_json::from_str(text).expect("JSON");
        v["instances"]
            .as_array()
            .unwrap()
            .iter()
            .map(|i| i["feature"].as_str().unwrap().to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(id_free(&stdout(&a)), id_free(&stdout(&b)));
}

#[test]
fn describe_prints_descriptor() {
    let tmp = TempDir::new().expect("temp dir");
    let dir = tmp.path();
    let out = featrec(
        &["generate", "--feature", "counterbore_hole", "--out", "m.json"],
        dir,
    );
    assert_success(&out, "generate");

    // Smallest face id first; any face works for the shape check. Use the
    // annular counterbore floor, which is the last planar face added (id 9).
    let out = featrec(&["describe", "--model", "m.json", "--face", "9"], dir);
    assert_success(&out, "describe");
    let d: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("descriptor JSON");
    assert_eq!(d["f_facetype"], "PLAN");
    assert_eq!(d["f_curvature"], "FLAT");
    assert_eq!(d["ax_coaxial"], true);
    let keys: Vec<&str> = d.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 20, "descriptor has all 20 items: {keys:?}");
}

#[test]
fn generate_standard_suite() {
    let tmp = TempDir::new().expect("temp dir");
    let dir = tmp.path();
    let out = featrec(&["generate", "--suite", "standard", "--out-dir", "suite"], dir);
    assert_success(&out, "generate suite");
    let listing = stdout(&out);
    assert!(listing.contains("counterbore_breakout"), "listing: {listing}");
    let entries = std::fs::read_dir(dir.join("suite")).expect("suite dir").count();
    assert!(entries >= 48, "model+truth per fixture, got {entries} files");
}

#[test]
fn templates_validate_reports_library() {
    let tmp = TempDir::new().expect("temp dir");
    let out = featrec(&["templates", "validate"], tmp.path());
    assert_success(&out, "templates validate");
    let text = stdout(&out);
    assert!(text.contains("templates OK"), "got: {text}");
    assert!(text.contains("16 features"), "got: {text}");
}

#[test]
fn exit_codes_follow_the_contract() {
    let tmp = TempDir::new().expect("temp dir");
    let dir = tmp.path();

    // Usage errors: exit 2.
    let out = featrec(&["no-such-command"], dir);
    assert_eq!(out.status.code(), Some(2), "unknown subcommand");
    let out = featrec(&["generate"], dir);
    assert_eq!(out.status.code(), Some(2), "generate without a mode");
    let out = featrec(&["recognize"], dir);
    assert_eq!(out.status.code(), Some(2), "recognize without --model");

    // Domain errors: exit 1, message on stderr.
    let out = featrec(&["recognize", "--model", "missing.json"], dir);
    assert_eq!(out.status.code(), Some(1), "missing model file");
    assert!(stderr(&out).contains("missing.json"), "names the file");

    let out = featrec(
        &["generate", "--feature", "no_such_feature", "--out", "x.json"],
        dir,
    );
    assert_eq!(out.status.code(), Some(1), "unknown feature");
    assert!(
        stderr(&out).contains("no_such_feature"),
        "names the feature: {}",
        stderr(&out)
    );

    let ok = featrec(
        &["generate", "--feature", "simple_hole", "--out", "m.json"],
        dir,
    );
    assert_eq!(ok.status.code(), Some(0), "success exit");
    let out = featrec(&["describe", "--model", "m.json", "--face", "999"], dir);
    assert_eq!(out.status.code(), Some(1), "unknown face id");
    assert!(
        stderr(&out).contains("face 999"),
        "names the entity: {}",
        stderr(&out)
    );
}

#[test]
fn config_file_drives_recognition() {
    let tmp = TempDir::new().expect("temp dir");
    let dir = tmp.path();
    let out = featrec(
        &["generate", "--feature", "simple_slot", "--out", "m.json"],
        dir,
    );
    assert_success(&out, "generate slot");

    // With an absurdly low slot-width threshold every floor reads LONGER,
    // so the slot template (which wants SHORTER) no longer matches.
    std::fs::write(
        dir.join("cfg.json"),
        r#"{ "conditions": { "slot_width_threshold": 0.001 } }"#,
    )
    .unwrap();
    let base = featrec(&["recognize", "--model", "m.json"], dir);
    let tuned = featrec(
        &["recognize", "--model", "m.json", "--config", "cfg.json"],
        dir,
    );
    assert_success(&base, "recognize default config");
    assert_success(&tuned, "recognize tuned config");
    let has_slot = |text: &str| {
        let v: serde_json::Value = serde_json::from_str(text).expect("JSON");
        v["instances"]
            .as_array()
            .unwrap()
            .iter()
            .any(|i| i["feature"] == "simple_slot")
    };
    assert!(has_slot(&stdout(&base)), "default config finds the slot");
    assert!(
        !has_slot(&stdout(&tuned)),
        "tuned config suppresses the slot match"
    );

    // An invalid config is a domain error.
    std::fs::write(dir.join("bad.json"), r#"{ "recognition": { "threshold": 0 } }"#).unwrap();
    let out = featrec(
        &["recognize", "--model", "m.json", "--config", "bad.json"],
        dir,
    );
    assert_eq!(out.status.code(), Some(1), "invalid config rejected");
}
