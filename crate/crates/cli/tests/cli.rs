use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

const SQUARE: &str = r#"{
  "obstacles": [[[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]],
  "center": [0, 0],
  "R": 2,
  "R1": 6,
  "source": [6, 0],
  "k": 2
}"#;

fn write_scene(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enclosure")).args(args).output().unwrap()
}

fn run_in(dir: &TempDir, cmd: &str, scene: &str, out: &str, extra: &[&str]) -> Output {
    let scene = write_scene(dir.path(), "scene.json", scene);
    let out = dir.path().join(out);
    let mut args = vec![cmd, "--scene", scene.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn error_code(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"].as_str().unwrap().to_string()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_writes_trace_and_diagnostics() {
    let dir = TempDir::new().unwrap();
    let out = run_in(&dir, "solve", SQUARE, "o", &["--trace-n", "256"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(dir.path().join("o/trace.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert!(lines[0].starts_with("# config_sha256="));
    assert_eq!(lines[1], "angle,re_u,im_u,re_du,im_du");
    assert_eq!(lines.len(), 2 + 256);
    let diag = json(dir.path().join("o/diagnostics.json"));
    assert!(diag["residual"].as_f64().unwrap() < 1e-8);
    assert!(diag["neumann_recovery_relative_difference"].as_f64().unwrap() < 1e-6);
    assert_eq!(diag["header"]["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(&dir, "solve", SQUARE, "a", &[]).status.success());
    assert!(run_in(&dir, "solve", SQUARE, "b", &[]).status.success());
    for f in ["trace.csv", "diagnostics.json"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap());
    }
    // a different configuration gets a different hash
    assert!(run_in(&dir, "solve", SQUARE, "c", &["--mesh-nodes", "96"]).status.success());
    let (a, c) = (json(dir.path().join("a/diagnostics.json")), json(dir.path().join("c/diagnostics.json")));
    assert_ne!(a["header"]["config_sha256"], c["header"]["config_sha256"]);
}

#[test]
fn source_on_measurement_circle_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = run_in(&dir, "solve", &SQUARE.replace("[6, 0]", "[0, 2]"), "o", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "TRACE_SOURCE_ON_CIRCLE");
}

#[test]
fn malformed_scene_reports_line() {
    let dir = TempDir::new().unwrap();
    let out = run_in(&dir, "solve", &SQUARE.replace("\"R\": 2,", "\"R\": 2"), "o", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "CONFIG");
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(v["message"].as_str().unwrap().contains("line 5"), "{v}");

    let out = run_in(&dir, "solve", &SQUARE.replace("\"k\": 2", "\"k\": 2, \"tau\": 1"), "o", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));
}

#[test]
fn hull_of_square() {
    let dir = TempDir::new().unwrap();
    let out = run_in(&dir, "hull", SQUARE, "o", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let hull = json(dir.path().join("o/hull.json"));
    assert!(hull["vertices"].as_array().unwrap().len() >= 4);
    assert_eq!(hull["filtered"].as_array().unwrap().len(), 4);
    let diag = json(dir.path().join("o/diagnostics.json"));
    assert!(diag["hausdorff_over_diameter"].as_f64().unwrap() < 0.1);
    let supports = fs::read_to_string(dir.path().join("o/supports.csv")).unwrap();
    assert_eq!(supports.lines().nth(1), Some("angle,h_hat,a,b,c,rms,usable"));
}

#[test]
fn hull_plane_wave_mode() {
    let dir = TempDir::new().unwrap();
    let out = run_in(&dir, "hull", SQUARE, "o", &["--mode", "planewave", "--directions", "16"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let diag = json(dir.path().join("o/diagnostics.json"));
    assert_eq!(diag["mode"], "planewave");
    for s in diag["supports"].as_array().unwrap() {
        assert!((s["h_hat"].as_f64().unwrap() - s["h_true"].as_f64().unwrap()).abs() < 0.08);
    }
}

#[test]
fn hull_with_too_few_trace_nodes() {
    let dir = TempDir::new().unwrap();
    let out = run_in(&dir, "hull", SQUARE, "o", &["--tau-max", "80", "--trace-n", "256"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_code(&out), "RESOLUTION");
}

#[test]
fn farfield_sweeps() {
    let dir = TempDir::new().unwrap();
    let out = run_in(&dir, "farfield", SQUARE, "sq", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = json(dir.path().join("sq/sweep.json"));
    assert!(sweep["reciprocity_defect"].as_f64().unwrap() < 1e-4);
    assert_eq!(sweep["sweeps"].as_array().unwrap().len(), 3);
    let rows = fs::read_to_string(dir.path().join("sq/operator.csv")).unwrap().lines().count();
    assert_eq!(rows, 2 + 32 * 32);

    let out = run_in(&dir, "farfield", SQUARE, "disc", &["--disc", "1.0"]);
    assert!(out.status.success());
    let sweep = json(dir.path().join("disc/sweep.json"));
    let center = &sweep["sweeps"][0];
    assert_eq!(center["label"], "disc center");
    assert_eq!(center["no_plateau"], false);
}

#[test]
fn empty_scene_gives_zero_operator() {
    let dir = TempDir::new().unwrap();
    let empty = SQUARE.replace("[[[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]]", "[]");
    assert!(run_in(&dir, "farfield", &empty, "f", &[]).status.success());
    assert_eq!(json(dir.path().join("f/sweep.json"))["zero_operator"], true);
    let op = fs::read_to_string(dir.path().join("f/operator.csv")).unwrap();
    assert!(op.lines().skip(2).all(|l| l.ends_with(",0.00000000000000000e0,0.00000000000000000e0")));
    assert!(run_in(&dir, "lsm", &empty, "l", &["--grid", "5"]).status.success());
    let map = fs::read_to_string(dir.path().join("l/lsm.csv")).unwrap();
    assert!(map.lines().skip(2).all(|l| l.ends_with(",0.00000000000000000e0")));
}

#[test]
fn lsm_map_peaks_inside() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(&dir, "lsm", SQUARE, "l", &["--grid", "5"]).status.success());
    let map = fs::read_to_string(dir.path().join("l/lsm.csv")).unwrap();
    let values: Vec<(f64, f64, f64)> = map
        .lines()
        .skip(2)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect();
    assert_eq!(values.len(), 25);
    let center = values.iter().find(|v| v.0 == 0.0 && v.1 == 0.0).unwrap().2;
    let corner = values.iter().find(|v| v.0 == 2.0 && v.1 == 2.0).unwrap().2;
    assert!(center > 10.0 * corner);
}

#[test]
fn oracle_check_passes() {
    let dir = TempDir::new().unwrap();
    let out = run_in(&dir, "oracle-check", SQUARE, "o", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(dir.path().join("o/oracle.json"))["pass"], true);
}

#[test]
fn missing_scene_is_a_config_error() {
    let out = run(&["solve"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "CONFIG");
}
