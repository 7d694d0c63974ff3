//! Blur ratio, displacement and half-length histogram of labelled clips.

use blurtrack::dataset::{compute_stats, ClipRecord, DatasetStats};
use blurtrack::synth::{rng, simulate_clip, ClipConfig};
use blurtrack::FrameAnnotation;

pub fn run() -> DatasetStats {
    let config = ClipConfig {
        frames: 20,
        ..ClipConfig::default()
    };
    let mut r = rng(1);
    let clips: Vec<ClipRecord> = (0..5)
        .map(|i| {
            let frames = simulate_clip(&config, &mut r).expect("clip");
            let rows = frames
                .iter()
                .map(|f| FrameAnnotation {
                    frame_index: f.frame_index,
                    label: f.label,
                })
                .collect();
            ClipRecord::new(format!("clip{i}"), rows)
        })
        .collect();
    let stats = compute_stats(&clips, 1.0);
    println!("blur ratio      {:.2}", stats.blur_ratio);
    if let Some(d) = stats.displacement {
        println!("displacement    {:.1} ± {:.1} px", d.mean, d.std);
    }
    for bin in &stats.histogram {
        println!(
            "l in [{:>4.1}, {:>4.1})  {}",
            bin.lower,
            bin.upper,
            "*".repeat(bin.count)
        );
    }
    stats
}

#[allow(dead_code)]
fn main() {
    run();
}
