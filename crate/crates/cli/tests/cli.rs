use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral-mirror"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn solve_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--domain", "rect:1,1", "--N", "20", "--L", "0.2", "--output", dir.path().to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["schema"], "spectral-mirror/1");
    assert_eq!(v["command"], "solve");
    let r = &v["result"];
    let value = r["value"]["raw"].as_f64().unwrap();
    // fewer constraints than the full criterion, so at least its bound
    assert!(value >= r["full_bound"].as_f64().unwrap() - 1e-9);
    assert!(r["duality_gap"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["beta"].as_array().unwrap().len(), 20);
    assert_eq!(r["density"]["values"].as_array().unwrap().len(), 4096);
    assert!(!r["bangbang"]["arcs"].as_array().unwrap().is_empty());
    assert!(v["warning"].is_null());

    assert_eq!(read(dir.path(), "result.json").as_bytes(), &out.stdout[..]);
    let csv = read(dir.path(), "density.csv");
    assert!(csv.starts_with("arclength,x,y,density,phi\n"));
    assert_eq!(csv.lines().count(), 4097);
    let svg = read(dir.path(), "boundary.svg");
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("stroke-width=\"5\""));
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = run(&["critical-l", "--domain", "rect:1,2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"closed_form\": 6.6666666666666663e-1"), "{text}");
}

#[test]
fn reruns_are_identical() {
    let args = ["solve", "--domain", "disk:1", "--N", "9", "--L", "-0.3", "--nodes", "1024"];
    let a = without_timing(json(&run(&args)));
    let b = without_timing(json(&run(&args)));
    assert_eq!(a, b);
    let csv = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_spectral-mirror"))
            .args(args)
            .args(["--format", "csv"])
            .env("SPECTRAL_MIRROR_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(csv("1"), csv("2"));
}

#[test]
fn rellich_residual_is_small_on_the_disk() {
    let v = json(&run(&["verify-rellich", "--domain", "disk:1", "--N", "30"]));
    assert!(v["result"]["max_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["result"]["modes"].as_array().unwrap().len(), 30);
}

#[test]
fn critical_l_of_the_quarter_sector() {
    let v = json(&run(&["critical-l", "--domain", "sector:0.7853981633974483,1"]));
    let want = 2.0 * PI / (4.0 + PI);
    assert!((v["result"]["closed_form"].as_f64().unwrap() - want).abs() < 1e-12);
    assert!((v["result"]["numeric"].as_f64().unwrap() - want).abs() < 1e-6);
}

#[test]
fn closed_form_scales_with_m() {
    let one = json(&run(&["closed-form", "--domain", "rect:2,1", "--L", "0.5"]));
    let two = json(&run(&["closed-form", "--domain", "rect:2,1", "--L", "0.5", "--M", "2"]));
    let raw = |v: &Value| v["result"]["value"]["raw"].as_f64().unwrap();
    assert!((raw(&two) - 2.0 * raw(&one)).abs() < 1e-14);
    let disk = json(&run(&["closed-form", "--domain", "disk:1", "--L", "0.5"]));
    assert_eq!(disk["result"]["optimal_set_exists"], true);
    assert!((disk["result"]["value"]["normalized"].as_f64().unwrap() - PI / 2.0).abs() < 1e-14);
}

#[test]
fn nogap_trajectory_matches_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["nogap", "--domain", "disk:1", "--L", "0.3", "--max-iter", "2"];
    let out = run(&[&args[..], &["--output", dir.path().to_str().unwrap()]].concat());
    let v = json(&out);
    let states = v["result"]["states"].as_array().unwrap();
    assert_eq!(states.len(), 3);
    let j: Vec<f64> = states.iter().map(|s| s["j_value"].as_f64().unwrap()).collect();
    assert!(j.windows(2).all(|p| p[1] > p[0]));
    let csv = run(&[&args[..], &["--format", "csv"]].concat());
    assert_eq!(read(dir.path(), "trajectory.csv").as_bytes(), &csv.stdout[..]);
    assert!(read(dir.path(), "boundary.svg").contains("stroke-width=\"5\""));
}

#[test]
fn strict_turns_warnings_into_status_4() {
    // the grid cap ends this run early with a diagnostic
    let args = ["nogap", "--domain", "disk:1", "--L", "0.3", "--max-iter", "10"];
    let lax = run(&args);
    assert_eq!(lax.status.code(), Some(0));
    assert!(json(&lax)["warning"].is_string());
    assert_eq!(run(&[&args[..], &["--strict"]].concat()).status.code(), Some(4));
}

#[test]
fn bad_input_exits_with_2() {
    for args in [
        &["solve", "--domain", "blob:1", "--N", "3", "--L", "0"][..],
        &["solve", "--domain", "disk:1", "--N", "3"],
        &["solve", "--domain", "disk:-1", "--N", "3", "--L", "0"],
        &["solve", "--domain", "disk:1", "--N", "3", "--L", "1.5"],
        &["solve", "--domain", "disk:1", "--N", "three", "--L", "0"],
        &["cesaro", "--domain", "disk:1", "--N", "3", "--format", "svg"],
        &["closed-form", "--domain", "ellipse:2,1", "--L", "0"],
        &["nogap", "--domain", "rect:1,1", "--L", "0.3"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn negative_mass_ratio_parses() {
    let v = json(&run(&["closed-form", "--domain", "rect:2,1", "--L", "-0.8"]));
    let want = -2.8 / PI;
    assert!((v["result"]["value"]["raw"].as_f64().unwrap() - want).abs() < 1e-14);
}
