//! End-to-end runs of the `blurtrack` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn blurtrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blurtrack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = blurtrack(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&ok(&all)).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(files(&path));
        } else {
            out.push((
                path.strip_prefix(dir).unwrap().to_path_buf(),
                fs::read(&path).unwrap(),
            ));
        }
    }
    out.sort();
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&[
        "render",
        "--seed",
        "7",
        "--output",
        s(&a),
        "--with-frames",
        "--noise",
        "0.1",
    ]);
    ok(&[
        "render",
        "--seed",
        "7",
        "--output",
        s(&b),
        "--with-frames",
        "--noise",
        "0.1",
    ]);
    let (fa, fb) = (files(&a), files(&b));
    assert!(fa.len() > 30);
    assert_eq!(fa, fb);
    let c = dir.path().join("c");
    ok(&["render", "--seed", "8", "--output", s(&c)]);
    assert_ne!(
        fs::read(c.join("labels.csv")).unwrap(),
        fs::read(a.join("labels.csv")).unwrap()
    );
}

#[test]
fn extract_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    ok(&["render", "--seed", "3", "--output", s(&bundle)]);
    let preds = dir.path().join("preds.csv");
    let v = json(&[
        "extract",
        "--input",
        s(&bundle),
        "--output",
        s(&preds),
        "--track",
    ]);
    assert_eq!(v["kind"], "extract");
    assert!(fs::read_to_string(&preds)
        .unwrap()
        .starts_with("Frame,Visibility,X,Y,Theta,L,Confidence"));

    let curve = dir.path().join("pr.csv");
    let labels = bundle.join("labels.csv");
    let v = json(&[
        "eval",
        "--input",
        s(&preds),
        "--labels",
        s(&labels),
        "--output",
        s(&curve),
    ]);
    assert_eq!(v["kind"], "metrics");
    assert_eq!(v["f1"], 1.0);
    assert_eq!(v["ap"], 1.0);
    assert!(fs::read_to_string(&curve)
        .unwrap()
        .starts_with("confidence,precision,recall"));

    let text = ok(&["eval", "--input", s(&preds), "--labels", s(&labels)]);
    assert!(text.contains("precision"));
}

#[test]
fn eval_sweeps_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    ok(&[
        "render",
        "--seed",
        "5",
        "--output",
        s(&bundle),
        "--noise",
        "0.2",
    ]);
    let table = dir.path().join("sweep.csv");
    let v = json(&[
        "eval",
        "--input",
        s(&bundle),
        "--deltas",
        "0.3,0.5,0.7,0.9",
        "--output",
        s(&table),
    ]);
    assert_eq!(v["kind"], "threshold_sweep");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    let csv = fs::read_to_string(&table).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("delta,precision,recall,f1\n0.3,"));
}

#[test]
fn relabel_round_trip_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let original = dir.path().join("mid.csv");
    let mut text = String::from("Frame,Visibility,X,Y,Theta,L\n");
    for k in 0..200 {
        let visible = k % 7 != 3;
        if visible {
            let x = 100.0 + k as f64 * 1.37;
            let y = 300.0 - k as f64 * 0.91;
            let theta = -179.5 + (k as f64 * 13.3) % 359.0;
            let l = (k % 23) as f64 * 0.45;
            text.push_str(&format!("{k:06},1,{x:.2},{y:.2},{theta:.1},{l:.2}\n"));
        } else {
            text.push_str(&format!("{k:06},0,0,0,0,0\n"));
        }
    }
    // canonicalize through the writer once
    fs::write(&original, &text).unwrap();
    let canonical = dir.path().join("canonical.csv");
    let table = blurtrack::io::csv::read_labels_csv(&original).unwrap();
    blurtrack::io::csv::write_labels_csv(&canonical, &table, 2).unwrap();

    let front = dir.path().join("front.csv");
    let back = dir.path().join("back.csv");
    ok(&[
        "relabel",
        "--input",
        s(&canonical),
        "--output",
        s(&front),
        "--to",
        "front",
    ]);
    ok(&[
        "relabel",
        "--input",
        s(&front),
        "--output",
        s(&back),
        "--to",
        "mid",
    ]);
    assert_eq!(fs::read(&canonical).unwrap(), fs::read(&back).unwrap());
    assert_ne!(fs::read(&canonical).unwrap(), fs::read(&front).unwrap());
}

#[test]
fn baseline_fit_and_stats_on_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    ok(&[
        "render",
        "--seed",
        "11",
        "--output",
        s(&bundle),
        "--with-frames",
        "--frames",
        "20",
    ]);
    let v = json(&["baseline", "--input", s(&bundle)]);
    assert_eq!(v["kind"], "baseline");

    let v = json(&[
        "fit",
        "--input",
        s(&bundle.join("labels.csv")),
        "--fps",
        "60",
    ]);
    assert!(v["mae_position"].as_f64().unwrap().is_finite());
    assert!(v["mae_blur"].as_f64().unwrap().is_finite());

    let v = json(&["stats", "--input", s(&bundle)]);
    assert_eq!(v["frames"], 20);
    assert!(v["blur_ratio"].as_f64().unwrap() > 0.5);
}

#[test]
fn calibrate_from_table_clicks() {
    use blurtrack::camera::{project, table_keypoints};
    let dir = tempfile::tempdir().unwrap();
    let cam = blurtrack::synth::broadcast_camera(1280, 720);
    let mut text = String::from("# u v per table keypoint\n");
    for w in table_keypoints() {
        let p = project(&cam, w).unwrap();
        text.push_str(&format!("{} {}\n", p.x, p.y));
    }
    let input = dir.path().join("clicks.txt");
    let output = dir.path().join("camera.txt");
    fs::write(&input, text).unwrap();
    let v = json(&[
        "calibrate",
        "--input",
        s(&input),
        "--width",
        "1280",
        "--height",
        "720",
        "--id",
        "game1",
        "--output",
        s(&output),
    ]);
    let focal = v["calibration"]["focal"].as_f64().unwrap();
    assert!((focal / cam.focal - 1.0).abs() < 0.005);
    let records =
        blurtrack::io::calibration::parse_calibrations(&fs::read_to_string(&output).unwrap())
            .unwrap();
    assert_eq!(records[0].id, "game1");
}

#[test]
fn exit_codes() {
    assert_eq!(blurtrack(&["extract", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        blurtrack(&["extract", "--input", "x", "--delta", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        blurtrack(&["render", "--output", "x"]).status.code(),
        Some(2)
    );
    assert_eq!(blurtrack(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        blurtrack(&["stats", "--input", "/nonexistent/labels"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(blurtrack(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    fs::write(&csv, "Frame,Visibility,X,Y,Theta,L\n1,1,1,1,0,0\n").unwrap();
    // CSV predictions need ground truth
    assert_eq!(
        blurtrack(&["eval", "--input", s(&csv)]).status.code(),
        Some(2)
    );
}
