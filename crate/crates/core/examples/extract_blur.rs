//! Recover position, blur angle and blur length from a noisy heatmap.

use blurtrack::extract::{detect, DetectParams, Detection};
use blurtrack::synth::{render_heatmap, rng, HeatmapNoise};
use blurtrack::{BlurLabel, HeatmapParams, Point2, RasterSize};

pub fn run() -> (BlurLabel, Detection) {
    let truth = BlurLabel::new(Point2::new(64.3, 40.7), (-35f64).to_radians(), 12.0);
    let noise = HeatmapNoise {
        uniform: 0.2,
        ..HeatmapNoise::default()
    };
    let heatmap = render_heatmap(
        Some(&truth),
        &HeatmapParams::default(),
        RasterSize::new(128, 80),
        &noise,
        &mut rng(11),
    )
    .expect("valid raster");
    let detections = detect(&heatmap, &DetectParams::default());
    let best = detections[0];
    println!("candidates      {}", detections.len());
    println!(
        "true position   ({:.2}, {:.2})",
        truth.center.x, truth.center.y
    );
    println!(
        "found position  ({:.2}, {:.2})",
        best.label.center.x, best.label.center.y
    );
    println!(
        "true angle      {:.1}°, found {:.1}°",
        truth.theta.to_degrees(),
        best.label.theta.to_degrees()
    );
    // The blob extends one disk radius past each streak end.
    println!(
        "true half-length {:.1}, found {:.1} (includes the disk radius)",
        truth.half_length, best.label.half_length
    );
    println!("confidence      {:.3}", best.confidence);
    (truth, best)
}

#[allow(dead_code)]
fn main() {
    run();
}
