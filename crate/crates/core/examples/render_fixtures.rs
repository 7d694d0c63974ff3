//! Render a seeded synthetic clip to a fixture bundle and read it back.

use blurtrack::io::fixtures::{read_bundle, write_bundle};
use blurtrack::synth::{rng, simulate_clip, ClipConfig};

pub fn run(dir: &std::path::Path) -> usize {
    let config = ClipConfig {
        render_frames: true,
        noise: 0.05,
        ..ClipConfig::default()
    };
    let frames = simulate_clip(&config, &mut rng(7)).expect("clip");
    write_bundle(dir, 7, &config, &frames).expect("bundle written");
    let bundle = read_bundle(dir).expect("bundle read");
    let visible = bundle
        .labels
        .rows
        .iter()
        .filter(|r| r.label.is_some())
        .count();
    println!(
        "{} frames in {}, ball visible in {visible}",
        bundle.heatmaps.len(),
        dir.display()
    );
    bundle.heatmaps.len()
}

#[allow(dead_code)]
fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fixture-bundle".into());
    run(std::path::Path::new(&dir));
}
