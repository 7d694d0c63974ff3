//! Track a ball through a clip with distractors and score the detections.

use blurtrack::eval::{evaluate, EvalConfig, FramePrediction};
use blurtrack::extract::{detect, DetectParams, Tracker, TrackerConfig};
use blurtrack::io::report::metrics_text;
use blurtrack::synth::{
    broadcast_camera, ground_truth_blur, random_flight, render_heatmap, rng, HeatmapNoise,
    Recording,
};
use blurtrack::{BlurLabel, HeatmapParams, Point2, RasterSize};

pub fn run() -> blurtrack::eval::MetricsReport {
    let size = RasterSize::new(512, 288);
    let camera = broadcast_camera(size.width, size.height);
    let recording = Recording::default();
    let mut r = rng(42);
    let flight = random_flight(&mut r);
    // a static bright spot, e.g. a shoe or a logo
    let distractor = (BlurLabel::sharp(Point2::new(60.0, 250.0)), 0.9);
    let mut tracker = Tracker::new(TrackerConfig::default());
    let mut frames = Vec::new();
    for k in 0..20u64 {
        let t = k as f64 / recording.fps;
        let gt = ground_truth_blur(&flight, &camera, t, recording.t_exp)
            .ok()
            .filter(|l| size.contains(l.center));
        let noise = HeatmapNoise {
            uniform: 0.15,
            amplitude: Some(0.9),
            distractors: vec![distractor],
        };
        let heatmap = render_heatmap(gt.as_ref(), &HeatmapParams::default(), size, &noise, &mut r)
            .expect("raster");
        let candidates = detect(&heatmap, &DetectParams::default());
        let chosen = tracker.update(k, &candidates);
        frames.push(FramePrediction {
            gt,
            pred: chosen.map(|d| d.label),
            confidence: chosen.map(|d| d.confidence),
            extra_candidates: candidates
                .len()
                .saturating_sub(usize::from(chosen.is_some())),
        });
    }
    let report = evaluate(&frames, &EvalConfig::default());
    print!("{}", metrics_text(&report));
    report
}

#[allow(dead_code)]
fn main() {
    run();
}
