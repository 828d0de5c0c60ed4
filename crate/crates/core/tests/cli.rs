use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_giant-scatter")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

/// Parses a CSV into a header and rows of optional numbers.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| if c.is_empty() { None } else { Some(c.parse().unwrap()) }).collect())
        .collect();
    (header, rows)
}

fn row_at(rows: &[Vec<Option<f64>>], col: usize, value: f64) -> &[Option<f64>] {
    rows.iter().find(|r| r[col] == Some(value)).unwrap()
}

const BLOCKING: &[&str] = &[
    "spectrum",
    "--model",
    "two-level",
    "--theta2",
    "1.5707963268",
    "--phi0",
    "1.5707963268",
    "--gamma-e",
    "4",
    "--tau",
    "0",
    "--obs",
    "T_1to2,T_2to1",
    "--delta",
    "-10:10:1001",
];

#[test]
fn spectrum_one_way_blocking() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let mut args = BLOCKING.to_vec();
    args.extend(["--out", out.to_str().unwrap()]);
    assert_eq!(code(&args), 0);
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["delta", "T_1to2", "T_2to1"]);
    assert_eq!(rows.len(), 1001);
    let r = row_at(&rows, 0, 0.0);
    assert!(r[1].unwrap() < 1e-9);
    assert!((r[2].unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn spectrum_is_deterministic_and_matches_stdout() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let mut args = BLOCKING.to_vec();
    args.extend(["--out", out.to_str().unwrap()]);
    assert_eq!(code(&args), 0);
    let stdout = run(BLOCKING).stdout;
    assert_eq!(fs::read(&out).unwrap(), stdout);
}

#[test]
#[allow(clippy::approx_constant)]
fn config_matches_flags() {
    let dir = tempdir().unwrap();
    let (from_flags, from_config) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let mut args = BLOCKING.to_vec();
    args.extend(["--out", from_flags.to_str().unwrap()]);
    assert_eq!(code(&args), 0);
    let config = serde_json::json!({
        "model": "two-level",
        "params": {"theta2": 1.5707963268, "phi0": 1.5707963268, "gamma_e": 4.0, "tau": 0.0},
        "axis1": {"param": "delta", "min": -10.0, "max": 10.0, "points": 1001},
        "observables": ["T_1to2", "T_2to1"],
        "out": from_config,
    });
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, config.to_string()).unwrap();
    assert_eq!(code(&["spectrum", "--config", cfg.to_str().unwrap()]), 0);
    assert_eq!(fs::read(&from_flags).unwrap(), fs::read(&from_config).unwrap());
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let base = serde_json::json!({
        "model": "two-level",
        "axis1": {"param": "delta", "min": -1.0, "max": 1.0, "points": 3},
        "observables": ["R"],
    });
    for (key, value) in [("colour", serde_json::json!(1)), ("params", serde_json::json!({"gamma": 1.0}))] {
        let mut c = base.clone();
        c[key] = value;
        fs::write(&cfg, c.to_string()).unwrap();
        assert_eq!(code(&["spectrum", "--config", cfg.to_str().unwrap()]), 2);
    }
    assert_eq!(code(&["spectrum", "--config", cfg.to_str().unwrap(), "--obs", "R"]), 2);
}

#[test]
fn parameter_and_usage_errors() {
    assert_eq!(code(&["spectrum", "--model", "two-level", "--gamma-wg", "0.0", "--obs", "R"]), 2);
    assert_eq!(code(&["spectrum", "--obs", "S_1to9"]), 2);
    assert_eq!(code(&["spectrum", "--obs", "R", "--rabi", "1"]), 2);
    assert_eq!(code(&["spectrum", "--obs", "R", "--delta", "1:-1:5"]), 2);
    assert_eq!(code(&["spectrum", "--obs", "R", "--engine", "fast"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn io_errors() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("missing/s.csv");
    assert_eq!(code(&["spectrum", "--obs", "R", "--delta", "-1:1:3", "--out", out.to_str().unwrap()]), 3);
    let cfg = dir.path().join("none.json");
    assert_eq!(code(&["spectrum", "--config", cfg.to_str().unwrap()]), 3);
}

#[test]
fn map_with_degrees() {
    let dir = tempdir().unwrap();
    let (deg, rad) = (dir.path().join("deg.csv"), dir.path().join("rad.csv"));
    let common = ["map", "--tau", "0.01", "--obs", "T_1to2", "--delta", "-1:1:3"];
    let mut a = common.to_vec();
    a.extend(["--phi0", "90", "--axis2", "theta=0,90,180", "--deg", "--out", deg.to_str().unwrap()]);
    let mut b = common.to_vec();
    let (half, pi) = (std::f64::consts::FRAC_PI_2.to_string(), std::f64::consts::PI.to_string());
    let axis = format!("theta=0,{half},{pi}");
    b.extend(["--phi0", &half, "--axis2", &axis, "--out", rad.to_str().unwrap()]);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    let (header, rows) = read_csv(&deg);
    assert_eq!(header, ["delta", "theta", "T_1to2"]);
    assert_eq!(rows.len(), 9);
    assert_eq!(read_csv(&deg), read_csv(&rad));
}

#[test]
fn figure_presets() {
    let dir = tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&["figure", "fig4inset", "--out-dir", d]), 0);
    let (header, rows) = read_csv(&dir.path().join("fig4inset.csv"));
    let r = header.iter().position(|h| h == "R").unwrap();
    assert!((row_at(&rows, 0, 0.0)[r].unwrap() - 1.0).abs() < 1e-9);

    assert_eq!(code(&["figure", "fig8d", "--out-dir", d]), 0);
    let (header, rows) = read_csv(&dir.path().join("fig8d.csv"));
    assert_eq!(header.len(), 17);
    let s13 = header.iter().position(|h| h == "S_1to3").unwrap();
    assert!((row_at(&rows, 0, 0.0)[s13].unwrap() - 1.0).abs() < 1e-6);

    assert_eq!(code(&["figure", "nope", "--out-dir", d]), 2);
    assert!(!dir.path().join("nope.csv").exists());
}

#[test]
fn figure_engines_agree() {
    let dir = tempdir().unwrap();
    let (cf, sv) = (dir.path().join("cf"), dir.path().join("sv"));
    for id in ["fig3b", "fig3d", "fig4", "fig7a"] {
        assert_eq!(code(&["figure", id, "--out-dir", cf.to_str().unwrap(), "--engine", "closed-form"]), 0);
        assert_eq!(code(&["figure", id, "--out-dir", sv.to_str().unwrap(), "--engine", "solver"]), 0);
        let (ha, a) = read_csv(&cf.join(format!("{id}.csv")));
        let (hb, b) = read_csv(&sv.join(format!("{id}.csv")));
        assert_eq!(ha, hb);
        for (ra, rb) in a.iter().zip(&b) {
            for (x, y) in ra.iter().zip(rb) {
                match (x, y) {
                    (Some(x), Some(y)) => assert!((x - y).abs() < 1e-9, "{id}: {x} vs {y}"),
                    (None, None) => {}
                    _ => panic!("{id}: cell defined by one engine only"),
                }
            }
        }
    }
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify", "--seed", "42", "--trials", "200", "--tol", "1e-10"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("result=PASS"));
    assert_eq!(code(&["verify", "--trials", "0"]), 2);
    assert_eq!(code(&["verify", "--trials", "50", "--corrupt-kernel"]), 1);
}

fn report(args: &[&str]) -> Vec<(String, String)> {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn value(report: &[(String, String)], key: &str) -> String {
    report.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone()).unwrap()
}

#[test]
fn device_reports() {
    let circ = report(&["device", "--preset", "circulator", "--delta", "0"]);
    assert_eq!(value(&circ, "fidelity"), "1.000000");
    let off = report(&["device", "--preset", "drive-off", "--source", "1", "--target", "4"]);
    assert_eq!(value(&off, "efficiency_1to4"), "0.000000");
    let custom = report(&[
        "device", "--model", "nabla", "--rabi", "2", "--theta2", "90", "--theta4", "90", "--phi-a0", "90", "--phi-b0",
        "90", "--deg",
    ]);
    assert!((value(&custom, "efficiency_1to4").parse::<f64>().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(code(&["device", "--preset", "circulator", "--cycle", "1,3,4"]), 2);
    assert_eq!(code(&["device", "--preset", "circulator", "--source", "1", "--target", "7"]), 2);
    assert_eq!(code(&["device", "--preset", "nope"]), 2);
}
