use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn syz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syz"))
        .args(args)
        .env_remove("SYZ_REGISTRY")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn homology(name: &str) -> Vec<String> {
    let out = syz(&["homology", &fixture(name)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    v["result"]["homology"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| h.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn octahedron_is_a_sphere() {
    assert_eq!(homology("octahedron.json"), ["Z", "0", "Z"]);
}

#[test]
fn circle_homology() {
    assert_eq!(homology("circle.json"), ["Z", "Z"]);
}

#[test]
fn corrupted_file_fails_with_json_error() {
    let out = syz(&["homology", &fixture("corrupted.json")]);
    assert!(!out.status.success());
    let v = json_of(&out);
    assert!(v["error"]["message"].as_str().unwrap().contains("line"));
}

#[test]
fn nonzero_boundary_squared_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // A triangle with one edge of the 2-cell boundary reversed.
    let text = r#"{"cells": [
        {"id": 0, "dim": 0}, {"id": 1, "dim": 0}, {"id": 2, "dim": 0},
        {"id": 3, "dim": 1}, {"id": 4, "dim": 1}, {"id": 5, "dim": 1},
        {"id": 6, "dim": 2}],
      "boundary": {"3": [[1, 1], [0, -1]], "4": [[2, 1], [1, -1]], "5": [[0, 1], [2, -1]],
                   "6": [[3, 1], [4, 1], [5, -1]]}}"#;
    std::fs::write(&path, text).unwrap();
    let out = syz(&["homology", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(json_of(&out)["error"]["message"].as_str().unwrap().contains("square"));
}

#[test]
fn same_request_gives_identical_bytes() {
    for args in [
        &["cremona", "--rows", "0,1"][..],
        &["lines", "--degree", "3"],
        &["schur", "--group", "k2-prime"],
        &["spectral", "--points", "3"],
    ] {
        let a = syz(args);
        let b = syz(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn duration_only_with_timing() {
    assert!(json_of(&syz(&["cubic"])).get("duration_ms").is_none());
    assert!(json_of(&syz(&["cubic", "--timing"]))["duration_ms"].is_number());
}

#[test]
fn twenty_seven_lines() {
    let v = json_of(&syz(&["lines", "--degree", "3"]));
    assert_eq!(v["result"]["count"], 27);
    assert_eq!(v["schema_version"], 1);
    assert!(!v["provenance"].as_array().unwrap().is_empty());
}

#[test]
fn bl3_sphere_checks() {
    let v = json_of(&syz(&["syzygy", "bl3", "--check"]));
    assert_eq!(v["result"]["vertices"], 9);
    assert_eq!(v["result"]["euler_characteristic"], 2);
    assert_eq!(v["result"]["valid"], true);
}

#[test]
fn cremona_rows_and_candidates() {
    let v = json_of(&syz(&["cremona", "--rows", "0,1", "--points", "4", "--e-max", "4"]));
    let r = &v["result"];
    for key in ["E10", "E20", "E30"] {
        assert_eq!(r["row0"][key], "0", "{key}");
    }
    assert_eq!(r["row1"]["E01"], "0");
    assert_eq!(r["row1"]["E11"], "0");
    assert_eq!(r["candidates"].as_array().unwrap().len(), 2);
    assert!(!v["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn registry_from_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reg.json");
    std::fs::write(
        &path,
        r#"[{"group": "Cr2 row 2", "degree": 0, "value": "K2(C)", "provenance": "test stand-in"}]"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_syz"))
        .args(["cremona", "--e21-zero"])
        .env("SYZ_REGISTRY", &path)
        .output()
        .unwrap();
    assert_eq!(json_of(&out)["result"]["candidates"][0], "K2(C)");
    let out = syz(&["cremona", "--e21-zero", "--registry", path.to_str().unwrap()]);
    assert_eq!(json_of(&out)["result"]["candidates"][0], "K2(C)");
}

#[test]
fn registry_without_provenance_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reg.json");
    std::fs::write(
        &path,
        r#"[{"group": "G", "degree": 0, "value": "Z", "provenance": ""}]"#,
    )
    .unwrap();
    let out = syz(&["schur", "--group", "pgl2", "--registry", path.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn unknown_command_is_a_json_error() {
    let out = syz(&["frobnicate"]);
    assert!(!out.status.success());
    assert_eq!(json_of(&out)["error"]["kind"], "usage");
}

#[test]
fn table_format_renders_grid() {
    let out = syz(&["spectral", "--base", "cremona", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("q=2"));
    assert!(text.contains("p=3"));
}
