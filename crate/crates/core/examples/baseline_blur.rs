//! Compare heatmap blur extraction with the frame-difference baseline on the
//! same synthetic scene.

use blurtrack::baseline::{baseline_blur, BaselineParams};
use blurtrack::extract::{detect, DetectParams};
use blurtrack::geometry::orientation_distance;
use blurtrack::synth::{matched_scene, rng, MatchedSceneConfig};

pub fn run() -> (f64, Option<f64>) {
    let scene = matched_scene(&MatchedSceneConfig::default(), &mut rng(5)).expect("valid scene");
    let truth = scene.label;
    let detection = detect(&scene.heatmap, &DetectParams::default())[0];
    let heatmap_error = orientation_distance(detection.label.theta, truth.theta).to_degrees();
    println!("true angle      {:.1}°", truth.theta.to_degrees());
    println!(
        "heatmap         {:.1}° (error {heatmap_error:.2}°)",
        detection.label.theta.to_degrees()
    );
    let baseline = baseline_blur(
        &scene.frame,
        &scene.reference,
        detection.position(),
        &BaselineParams::default(),
    );
    let baseline_error = match baseline {
        Ok(b) => {
            let e = orientation_distance(b.theta, truth.theta).to_degrees();
            println!(
                "frame diff      {:.1}° (error {e:.2}°)",
                b.theta.to_degrees()
            );
            Some(e)
        }
        Err(e) => {
            println!("frame diff      failed: {e}");
            None
        }
    };
    (heatmap_error, baseline_error)
}

#[allow(dead_code)]
fn main() {
    run();
}
