use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowheight"))
        .args(args)
        .output()
        .expect("spawn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn simulate_into(dir: &Path, extra: &[&str]) {
    let d = dir.to_str().unwrap();
    let mut args = vec!["simulate", "--out", d];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn measurements_bypass_prints_heights() {
    let o = run(&[
        "estimate",
        "--measurements",
        "580,56,592,43",
        "--measurements",
        "495,35,504,28",
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("M1 2.932 cm"), "{s}");
    assert!(s.contains("M2 2.593 cm"), "{s}");
}

#[test]
fn degenerate_measurement_is_a_target_failure() {
    let o = run(&["estimate", "--measurements", "100,10,100,10"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("M1 FAILED"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["estimate", "--measurements", "1,2,3"])), 2);
    assert_eq!(code(&run(&["estimate"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn reproduce_table3_reports_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t3");
    let o = run(&["reproduce-table3", "--json", "--out", out.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 15);
    // One published row does not follow from its own measurements.
    assert_eq!(v["failed"], 1);
    assert_eq!(code(&o), 1);
    assert!(out.join("table3.json").exists() && out.join("table3.txt").exists());
}

#[test]
fn simulate_then_estimate_recovers_heights() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    simulate_into(&sim, &[]);
    for f in [
        "frame1.pgm",
        "frame1.json",
        "frame2.pgm",
        "labels1.pgm",
        "poses.csv",
        "scene.json",
        "config.resolved.toml",
    ] {
        assert!(sim.join(f).exists(), "{f}");
    }
    let est = dir.path().join("est");
    let o = run(&[
        "estimate",
        sim.join("frame1.pgm").to_str().unwrap(),
        sim.join("frame2.pgm").to_str().unwrap(),
        "--scene",
        sim.join("scene.json").to_str().unwrap(),
        "--out",
        est.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["delta_h_m"], 0.1);
    let rows = v["estimates"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!(r["error_cm"].as_f64().unwrap().abs() < 0.5, "{r}");
    }
    assert!(est.join("report.csv").exists() && est.join("overlay1.png").exists());
}

#[test]
fn failing_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = run(&[
        "simulate",
        "--scene",
        "/no/such/scene.json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[sonar]\nr_min_m = 3.0\n").unwrap();
    let o = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn mismatched_fields_of_view_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    simulate_into(&a, &[]);
    let cfg = dir.path().join("wide.toml");
    fs::write(&cfg, "[sonar]\nn_beams = 64\nbeam_width_deg = 0.5\n").unwrap();
    simulate_into(&b, &["--config", cfg.to_str().unwrap()]);
    let out = dir.path().join("est");
    let o = run(&[
        "estimate",
        a.join("frame1.pgm").to_str().unwrap(),
        b.join("frame2.pgm").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn pose_log_without_the_frame_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    simulate_into(&sim, &[]);
    let log = sim.join("poses.csv");
    let text = fs::read_to_string(&log).unwrap();
    let kept: Vec<&str> = text.lines().take(2).collect();
    fs::write(&log, kept.join("\n") + "\n").unwrap();
    let o = run(&[
        "estimate",
        sim.join("frame1.pgm").to_str().unwrap(),
        sim.join("frame2.pgm").to_str().unwrap(),
        "--poses",
        log.to_str().unwrap(),
        "--out",
        dir.path().join("est").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no pose"));
}

#[test]
fn zero_altitude_change_warns_and_estimate_fails_per_target() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let o = run(&["simulate", "--delta-h", "0", "--out", sim.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let o = run(&[
        "estimate",
        sim.join("frame1.pgm").to_str().unwrap(),
        sim.join("frame2.pgm").to_str().unwrap(),
        "--out",
        dir.path().join("est").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn survey_mosaic_annotates_five_targets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = run(&[
        "mosaic",
        "--seed",
        "5",
        "--json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["frames"], 6);
    assert_eq!(v["annotations"].as_array().unwrap().len(), 5);
    for f in [
        "mosaic.pgm",
        "mosaic.json",
        "annotations.json",
        "mosaic.png",
        "poses.csv",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn mosaic_from_saved_frames_with_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    simulate_into(&sim, &["--speckle", "0.05"]);
    let out = dir.path().join("m");
    let o = run(&[
        "mosaic",
        sim.join("frame1.pgm").to_str().unwrap(),
        sim.join("frame2.pgm").to_str().unwrap(),
        "--pairs",
        "--poses",
        sim.join("poses.csv").to_str().unwrap(),
        "--json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["annotations"].as_array().unwrap().len(), 5);
}
