use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bouncing_billiard::io::{parse_orbit_csv, CSV_HEADER};

fn bob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bob")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SEGMENT: &str = r#"{"id":"seg","shape":{"type":"segment"},"initial":[{"x":0.1,"h":0.6,"theta":0.2}],"steps":50}"#;

#[test]
fn orbit_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.json", SEGMENT);
    let csv = dir.path().join("o.csv");
    let svg = dir.path().join("o.svg");
    let out = bob(&["orbit", "--config", &cfg, "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    let rows = parse_orbit_csv(&text).unwrap();
    assert_eq!(rows.len(), 51);
    assert!(rows.iter().all(|r| r.p.y == 0.6));
    assert!(fs::read_to_string(&svg).unwrap().contains("<circle"));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["id"], "seg");
}

#[test]
fn several_initial_conditions_get_indexed_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "e.json",
        r#"{"shape":{"type":"ellipse","a":1,"b":0.5},"initial":[{"x":0,"y":2,"angle":-1.4},{"x":2,"y":0,"angle":3.0}],"steps":20}"#,
    );
    let csv = dir.path().join("o.csv");
    let out = bob(&["orbit", "--config", &cfg, "--out", csv.to_str().unwrap(), "--steps", "7"]);
    assert!(out.status.success());
    for i in 0..2 {
        let rows = parse_orbit_csv(&fs::read_to_string(dir.path().join(format!("o-{i}.csv"))).unwrap()).unwrap();
        assert_eq!(rows.len(), 8);
    }
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(bob(&["orbit", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
    let cfg = write_config(dir.path(), "bad.json", r#"{"shape":{"type":"segment"},"initial":[],"steps":1}"#);
    let out = bob(&["orbit", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("initial"));
    assert_eq!(bob(&["orbit"]).status.code(), Some(1));
    assert_eq!(bob(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bob(&["rotation", "--height", "-1"]).status.code(), Some(1));
    assert_eq!(bob(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sw.json",
        r#"{
            "base": {"shape":{"type":"segment"},"initial":[{"x":0,"h":0.5,"theta":0}],"steps":0},
            "task": "period4",
            "axes": [{"param":"height","values":[0.25,0.5,0.75]}]
        }"#,
    );
    let out_path = dir.path().join("sw.csv");
    let out = bob(&["--threads", "2", "sweep", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().next().unwrap().starts_with("cell,height"));
}

#[test]
fn rotation_table_and_target() {
    let out = bob(&["rotation", "--height", "0.5", "--samples", "5", "--target", "4.0"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 6);
    assert!(String::from_utf8_lossy(&out.stderr).contains("orbit with rotation 4"));
}

#[test]
fn fixed_points_of_the_ellipse() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "e.json",
        r#"{"shape":{"type":"ellipse","a":1,"b":0.4},"initial":[{"x":0,"y":2,"angle":-1.5}],"steps":1}"#,
    );
    let out = bob(&["fixed-points", "--config", &cfg, "--radius", "1.5", "2.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows.len() >= 8);
    for row in rows {
        let residual: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(residual < 1e-8);
    }
}

#[test]
fn plot_prints_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.json", SEGMENT);
    let out = bob(&["plot", "--config", &cfg, "--bounces", "--dot-radius", "2"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.contains("<svg") && svg.contains(r#"r="2.00""#));
}

#[test]
fn quick_verification_reports_every_claim() {
    let out = bob(&["verify", "--quick"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 15);
    let failed = stdout.lines().filter(|l| l.starts_with("[FAIL]")).count();
    // exit status 2 exactly when a claim fails
    assert_eq!(out.status.code(), Some(if failed > 0 { 2 } else { 0 }));
}
