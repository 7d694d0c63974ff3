//! Synthetic rallies and renderers used as a ground-truth oracle.
//!
//! All randomness flows through [`SynthRng`], a ChaCha8 generator seeded with
//! a `u64`, so a seed fully determines every scene. Other implementations
//! should share fixtures through the bundle format in [`crate::io::fixtures`]
//! rather than attempting RNG parity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::baseline::GrayFrame;
use crate::camera::{project, CameraError, CameraModel, Vec3};
use crate::geometry::{blur_endpoints, BlurLabel, BlurSegment, Point2};
use crate::heatmap::{real_blur_map, Heatmap, HeatmapError, HeatmapParams, RasterSize};
use crate::trajectory::Observation;

pub type SynthRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SynthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const GRAVITY: f64 = 9.81;

/// Ball state with constant acceleration over one flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallState3D {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
}

/// `p0 + v0 t + a t² / 2`.
pub fn simulate_flight(state: &BallState3D, t: f64) -> Vec3 {
    std::array::from_fn(|i| {
        state.position[i] + state.velocity[i] * t + 0.5 * state.acceleration[i] * t * t
    })
}

/// Streak label of the ball exposed over `[t - t_exp/2, t + t_exp/2]`,
/// approximated by the chord between the projected ends. `theta` points along
/// the motion, so `p1` is the leading edge.
pub fn ground_truth_blur(
    state: &BallState3D,
    camera: &CameraModel,
    t: f64,
    t_exp: f64,
) -> Result<BlurLabel, CameraError> {
    let p1 = project(camera, simulate_flight(state, t + 0.5 * t_exp))?;
    let p2 = project(camera, simulate_flight(state, t - 0.5 * t_exp))?;
    Ok(BlurSegment::new(p1, p2).to_label())
}

/// Corruptions applied on top of a rendered ground-truth heatmap to mimic a
/// detector output.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HeatmapNoise {
    /// Additive noise drawn uniformly from `[0, uniform]`.
    pub uniform: f64,
    /// Peak scale of the ball blob; `None` keeps the ground-truth values.
    pub amplitude: Option<f64>,
    /// Extra blobs `(label, peak scale)`.
    pub distractors: Vec<(BlurLabel, f64)>,
}

/// Real-valued blur heatmap of `label`, optionally corrupted.
///
/// Without noise, amplitude or distractors the result is bit-identical to
/// [`real_blur_map`] and no random numbers are drawn.
pub fn render_heatmap(
    label: Option<&BlurLabel>,
    params: &HeatmapParams,
    size: RasterSize,
    noise: &HeatmapNoise,
    rng: &mut SynthRng,
) -> Result<Heatmap, HeatmapError> {
    let scaled = |label: &BlurLabel, amplitude: Option<f64>| -> Result<Heatmap, HeatmapError> {
        let map = real_blur_map(&blur_endpoints(label), params, size)?;
        match amplitude {
            None => Ok(map),
            Some(a) => Heatmap::from_values(
                size,
                map.values()
                    .iter()
                    .map(|v| (v * a).clamp(0.0, 1.0))
                    .collect(),
            ),
        }
    };
    let mut map = match label {
        Some(l) => scaled(l, noise.amplitude)?,
        None => Heatmap::zeros(size)?,
    };
    for (d, a) in &noise.distractors {
        map.max_with(&scaled(d, Some(*a))?);
    }
    if noise.uniform > 0.0 {
        let values = map
            .values()
            .iter()
            .map(|v| (v + rng.random::<f64>() * noise.uniform).clamp(0.0, 1.0))
            .collect();
        map = Heatmap::from_values(size, values)?;
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallAppearance {
    /// Disc radius, pixels (≥ 1).
    pub radius: f64,
    /// Ball intensity in `[0, 1]`.
    pub intensity: f64,
}

impl Default for BallAppearance {
    fn default() -> Self {
        Self {
            radius: 3.0,
            intensity: 0.95,
        }
    }
}

/// Number of disc stamps averaged along a streak.
pub const EXPOSURE_STAMPS: usize = 64;

/// Adds the exposure-averaged streak of `label` onto `frame`: each of the
/// stamps contributes `(ball - background) / N` times its anti-aliased
/// coverage.
pub fn stamp_streak(frame: &mut GrayFrame, label: &BlurLabel, ball: &BallAppearance) {
    let seg = blur_endpoints(label);
    let n = EXPOSURE_STAMPS;
    let r = ball.radius.max(1.0);
    let reach = r + 1.0;
    let (w, h) = (frame.width(), frame.height());
    let x0 = (seg.p1.x.min(seg.p2.x) - reach).floor().max(0.0) as usize;
    let y0 = (seg.p1.y.min(seg.p2.y) - reach).floor().max(0.0) as usize;
    let x1 = ((seg.p1.x.max(seg.p2.x) + reach).ceil().max(0.0) as usize).min(w.saturating_sub(1));
    let y1 = ((seg.p1.y.max(seg.p2.y) + reach).ceil().max(0.0) as usize).min(h.saturating_sub(1));
    if x0 > x1 || y0 > y1 || w == 0 || h == 0 {
        return;
    }
    let stamps: Vec<Point2> = (0..n)
        .map(|i| seg.p2 + (seg.p1 - seg.p2) * ((i as f64 + 0.5) / n as f64))
        .collect();
    for y in y0..=y1 {
        for x in x0..=x1 {
            let p = Point2::new(x as f64, y as f64);
            let coverage: f64 = stamps
                .iter()
                .map(|s| (r + 0.5 - p.distance(*s)).clamp(0.0, 1.0))
                .sum::<f64>()
                / n as f64;
            if coverage > 0.0 {
                let bg = frame.get(x, y);
                frame.set(x, y, bg + coverage * (ball.intensity - bg));
            }
        }
    }
}

/// Frame `n` with the exposure-averaged ball, and the reference frame with the
/// ball at `reference` (or without a ball).
pub fn render_gray_frames(
    label: &BlurLabel,
    background: &GrayFrame,
    ball: &BallAppearance,
    reference: Option<&BlurLabel>,
) -> (GrayFrame, GrayFrame) {
    let mut frame = background.clone();
    stamp_streak(&mut frame, label, ball);
    let mut reference_frame = background.clone();
    if let Some(r) = reference {
        stamp_streak(&mut reference_frame, r, ball);
    }
    (frame, reference_frame)
}

/// Smooth random background made of a few low-frequency cosine waves around a
/// base level drawn from `level`.
pub fn textured_background(
    width: usize,
    height: usize,
    level: (f64, f64),
    rng: &mut SynthRng,
) -> GrayFrame {
    let base = rng.random_range(level.0..=level.1);
    let waves: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.random_range(0.02..0.12),
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let values = (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            let v: f64 = waves
                .iter()
                .map(|(amp, fx, fy, phase)| amp * (fx * x + fy * y + phase).cos())
                .sum();
            (base + v).clamp(0.0, 1.0)
        })
        .collect();
    GrayFrame::from_values(width, height, values).expect("background values are clamped")
}

/// Adds zero-mean Gaussian sensor noise.
pub fn add_sensor_noise(frame: &mut GrayFrame, sigma: f64, rng: &mut SynthRng) {
    if sigma <= 0.0 {
        return;
    }
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            let v = frame.get(x, y) + normal.sample(rng);
            frame.set(x, y, v);
        }
    }
}

/// Random streak label with its whole blur region inside the raster.
pub fn random_label(
    rng: &mut SynthRng,
    size: RasterSize,
    half_length: (f64, f64),
    margin: f64,
) -> BlurLabel {
    let l = rng.random_range(half_length.0..=half_length.1);
    let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let pad = l + margin;
    let cx = rng.random_range(pad..size.width as f64 - pad);
    let cy = rng.random_range(pad..size.height as f64 - pad);
    BlurLabel::new(Point2::new(cx, cy), theta, l)
}

/// Elevated broadcast-style view from behind the `-Y` end of the table.
pub fn broadcast_camera(width: usize, height: usize) -> CameraModel {
    let focal = 1.15 * width as f64;
    CameraModel::look_at(
        focal,
        [0.0, -7.5, 3.0],
        [0.0, 0.3, 0.0],
        [0.0, 0.0, 1.0],
        width,
        height,
    )
}

/// Random over-the-table flight towards `+Y`, with gravity plus a mild
/// constant drag/Magnus term.
pub fn random_flight(rng: &mut SynthRng) -> BallState3D {
    BallState3D {
        position: [
            rng.random_range(-0.6..0.6),
            rng.random_range(-1.6..-1.0),
            rng.random_range(0.15..0.45),
        ],
        velocity: [
            rng.random_range(-1.5..1.5),
            rng.random_range(5.0..11.0),
            rng.random_range(0.5..2.5),
        ],
        acceleration: [
            rng.random_range(-1.0..1.0),
            rng.random_range(-3.0..0.0),
            -GRAVITY + rng.random_range(-2.0..2.0),
        ],
    }
}

/// Timing of a synthetic recording.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recording {
    pub fps: f64,
    /// Shutter time, seconds.
    pub t_exp: f64,
}

impl Default for Recording {
    fn default() -> Self {
        Self {
            fps: 60.0,
            t_exp: 1.0 / 240.0,
        }
    }
}

/// One rendered frame of a synthetic clip.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthFrameTruth {
    pub frame_index: u64,
    pub t: f64,
    /// `None` when the ball is outside the image.
    pub label: Option<BlurLabel>,
    pub heatmap: Heatmap,
    pub gray_frame: Option<GrayFrame>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipConfig {
    pub size: RasterSize,
    pub frames: usize,
    pub recording: Recording,
    pub heatmap: HeatmapParams,
    pub noise: f64,
    pub render_frames: bool,
}

impl Default for ClipConfig {
    fn default() -> Self {
        Self {
            size: RasterSize::new(512, 288),
            frames: 16,
            recording: Recording::default(),
            heatmap: HeatmapParams::default(),
            noise: 0.0,
            render_frames: false,
        }
    }
}

/// Renders a clip of one random flight seen by [`broadcast_camera`].
pub fn simulate_clip(
    config: &ClipConfig,
    rng: &mut SynthRng,
) -> Result<Vec<SynthFrameTruth>, HeatmapError> {
    let camera = broadcast_camera(config.size.width, config.size.height);
    let flight = random_flight(rng);
    let background = config
        .render_frames
        .then(|| textured_background(config.size.width, config.size.height, (0.3, 0.5), rng));
    let noise = HeatmapNoise {
        uniform: config.noise,
        ..HeatmapNoise::default()
    };
    let mut frames = Vec::with_capacity(config.frames);
    for k in 0..config.frames {
        let t = k as f64 / config.recording.fps;
        let label = ground_truth_blur(&flight, &camera, t, config.recording.t_exp)
            .ok()
            .filter(|l| config.size.contains(l.center));
        let heatmap = render_heatmap(label.as_ref(), &config.heatmap, config.size, &noise, rng)?;
        let gray_frame = background.as_ref().map(|bg| {
            let mut frame = bg.clone();
            if let Some(l) = &label {
                stamp_streak(&mut frame, l, &BallAppearance::default());
            }
            frame
        });
        frames.push(SynthFrameTruth {
            frame_index: k as u64,
            t,
            label,
            heatmap,
            gray_frame,
        });
    }
    Ok(frames)
}

/// A fitting window and the remaining flight it should predict.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryCase {
    pub observations: Vec<Observation>,
    /// `(t, position)` of the frames after the window.
    pub remaining: Vec<(f64, Point2)>,
    pub flight: BallState3D,
}

/// Projects a random flight, keeps `window` noisy observations with exact
/// chord blur, and the next `horizon` true positions.
pub fn trajectory_case(
    rng: &mut SynthRng,
    camera: &CameraModel,
    recording: &Recording,
    window: usize,
    horizon: usize,
    position_sigma: f64,
) -> Result<TrajectoryCase, CameraError> {
    let flight = random_flight(rng);
    let normal = Normal::new(0.0, position_sigma.max(0.0)).expect("non-negative sigma");
    let mut observations = Vec::with_capacity(window);
    for k in 0..window {
        let t = k as f64 / recording.fps;
        let label = ground_truth_blur(&flight, camera, t, recording.t_exp)?;
        let noisy = label.center + Point2::new(normal.sample(rng), normal.sample(rng));
        observations.push(Observation::with_blur(
            t,
            noisy,
            label.half_length,
            label.theta,
        ));
    }
    let remaining = (window..window + horizon)
        .map(|k| {
            let t = k as f64 / recording.fps;
            project(camera, simulate_flight(&flight, t)).map(|p| (t, p))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrajectoryCase {
        observations,
        remaining,
        flight,
    })
}

/// A heatmap and a gray frame pair showing the same streak.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedScene {
    pub label: BlurLabel,
    pub heatmap: Heatmap,
    pub frame: GrayFrame,
    pub reference: GrayFrame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedSceneConfig {
    pub size: RasterSize,
    pub half_length: (f64, f64),
    pub heatmap: HeatmapParams,
    pub heatmap_noise: f64,
    pub ball: BallAppearance,
    pub background_level: (f64, f64),
    pub sensor_noise: f64,
    /// Exposure as a fraction of the frame interval; sets how far the ball
    /// travels between frames relative to its streak.
    pub duty_cycle: f64,
    pub reference_offset: u32,
}

impl Default for MatchedSceneConfig {
    fn default() -> Self {
        Self {
            size: RasterSize::new(160, 120),
            half_length: (3.5, 20.0),
            heatmap: HeatmapParams::default(),
            heatmap_noise: 0.2,
            ball: BallAppearance {
                radius: 3.0,
                intensity: 1.0,
            },
            background_level: (0.1, 0.25),
            sensor_noise: 0.03,
            duty_cycle: 0.5,
            reference_offset: 2,
        }
    }
}

/// One scene rendered both as a noisy heatmap and as a noisy frame pair with
/// the ball `reference_offset` frames earlier in the reference frame.
pub fn matched_scene(
    config: &MatchedSceneConfig,
    rng: &mut SynthRng,
) -> Result<MatchedScene, HeatmapError> {
    let label = random_label(
        rng,
        config.size,
        config.half_length,
        config.heatmap.radius + 4.0,
    );
    let noise = HeatmapNoise {
        uniform: config.heatmap_noise,
        ..HeatmapNoise::default()
    };
    let heatmap = render_heatmap(Some(&label), &config.heatmap, config.size, &noise, rng)?;
    // full streak length 2l covers duty_cycle of the inter-frame travel
    let travel = 2.0 * label.half_length / config.duty_cycle;
    let back = Point2::from_angle(label.theta) * (travel * config.reference_offset as f64);
    let earlier = BlurLabel::new(label.center - back, label.theta, label.half_length);
    let background = textured_background(
        config.size.width,
        config.size.height,
        config.background_level,
        rng,
    );
    let (mut frame, mut reference) =
        render_gray_frames(&label, &background, &config.ball, Some(&earlier));
    add_sensor_noise(&mut frame, config.sensor_noise, rng);
    add_sensor_noise(&mut reference, config.sensor_noise, rng);
    Ok(MatchedScene {
        label,
        heatmap,
        frame,
        reference,
    })
}

/// Settings of a detector-like heatmap corpus: balls of varying strength,
/// weaker distractor blobs, frames without a ball, and uniform noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub size: RasterSize,
    pub frames: usize,
    pub heatmap: HeatmapParams,
    pub half_length: (f64, f64),
    /// Share of frames that contain the ball.
    pub ball_rate: f64,
    pub ball_amplitude: (f64, f64),
    pub max_distractors: usize,
    pub distractor_amplitude: (f64, f64),
    pub noise: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            size: RasterSize::new(128, 96),
            frames: 400,
            heatmap: HeatmapParams::default(),
            half_length: (0.0, 15.0),
            ball_rate: 0.85,
            ball_amplitude: (0.45, 1.0),
            max_distractors: 2,
            distractor_amplitude: (0.15, 0.75),
            noise: 0.2,
        }
    }
}

/// Heatmaps paired with their ground truth.
pub fn detection_corpus(
    config: &CorpusConfig,
    rng: &mut SynthRng,
) -> Result<Vec<(Heatmap, Option<BlurLabel>)>, HeatmapError> {
    let margin = config.heatmap.radius + 2.0;
    (0..config.frames)
        .map(|_| {
            let label = (rng.random::<f64>() < config.ball_rate)
                .then(|| random_label(rng, config.size, config.half_length, margin));
            let amplitude = rng.random_range(config.ball_amplitude.0..=config.ball_amplitude.1);
            let count = rng.random_range(0..=config.max_distractors);
            let distractors = (0..count)
                .map(|_| {
                    let d = random_label(rng, config.size, (0.0, 4.0), margin);
                    let a = rng.random_range(
                        config.distractor_amplitude.0..=config.distractor_amplitude.1,
                    );
                    (d, a)
                })
                .collect();
            let noise = HeatmapNoise {
                uniform: config.noise,
                amplitude: Some(amplitude),
                distractors,
            };
            let hm = render_heatmap(label.as_ref(), &config.heatmap, config.size, &noise, rng)?;
            Ok((hm, label))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::{baseline_blur, BaselineError, BaselineParams};
    use crate::extract::{detect, DetectParams};
    use crate::geometry::orientation_distance;
    use crate::trajectory::{blur_velocity, fit_position};

    #[test]
    fn free_fall() {
        let s = BallState3D {
            position: [1.0, 2.0, 3.0],
            velocity: [0.0; 3],
            acceleration: [0.0, 0.0, -9.81],
        };
        assert_eq!(simulate_flight(&s, 0.0), [1.0, 2.0, 3.0]);
        let p = simulate_flight(&s, 1.0);
        assert!((p[2] - 3.0 + 4.905).abs() < 1e-12);
    }

    #[test]
    fn static_ball_has_no_blur() {
        let cam = broadcast_camera(512, 288);
        let s = BallState3D {
            position: [0.1, 0.2, 0.3],
            velocity: [0.0; 3],
            acceleration: [0.0; 3],
        };
        assert_eq!(
            ground_truth_blur(&s, &cam, 0.3, 0.01).unwrap().half_length,
            0.0
        );
    }

    #[test]
    fn horizontal_image_motion() {
        // camera looking down +Z, world X maps to image x
        let cam = CameraModel::new(1000.0, [0.0; 3], [0.0, 0.0, 2.0], 640, 480);
        // 1000 px/s in the image = 2 m/s at depth 2 with f = 1000
        let s = BallState3D {
            position: [0.0; 3],
            velocity: [2.0, 0.0, 0.0],
            acceleration: [0.0; 3],
        };
        let label = ground_truth_blur(&s, &cam, 0.0, 0.01).unwrap();
        assert!((label.half_length - 5.0).abs() < 1e-9);
        assert!(label.theta.abs() < 1e-12);
    }

    #[test]
    fn chord_stays_close_to_arc() {
        let mut r = rng(5);
        let cam = broadcast_camera(1280, 720);
        let rec = Recording::default();
        for _ in 0..100 {
            let flight = random_flight(&mut r);
            for k in 0..15 {
                let t = k as f64 / rec.fps;
                let Ok(label) = ground_truth_blur(&flight, &cam, t, rec.t_exp) else {
                    continue;
                };
                let seg = blur_endpoints(&label);
                // image acceleration by central differences
                let h = 1e-3;
                let p = |dt: f64| project(&cam, simulate_flight(&flight, t + dt)).unwrap();
                let acc = (p(h) + p(-h) - p(0.0) * 2.0) * (1.0 / (h * h));
                let bound = acc.norm() * rec.t_exp * rec.t_exp / 8.0;
                if bound > 0.1 {
                    continue;
                }
                let deviation = (0..=50)
                    .map(|i| {
                        let dt = (i as f64 / 50.0 - 0.5) * rec.t_exp;
                        seg.distance_to(p(dt))
                    })
                    .fold(0.0, f64::max);
                assert!(deviation <= 0.1, "deviation {deviation}");
            }
        }
    }

    #[test]
    fn projected_flights_are_nearly_quadratic() {
        // Windows of 12 frames at 60 fps on the heatmap raster, with ≤ 20%
        // depth variation.
        let mut r = rng(21);
        let cam = broadcast_camera(512, 288);
        let mut checked = 0;
        let mut worst: f64 = 0.0;
        while checked < 100 {
            let flight = random_flight(&mut r);
            let ts: Vec<f64> = (0..12).map(|k| k as f64 / 60.0).collect();
            let depths: Vec<f64> = ts
                .iter()
                .map(|t| cam.to_camera(simulate_flight(&flight, *t))[2])
                .collect();
            let (lo, hi) = depths
                .iter()
                .fold((f64::MAX, f64::MIN), |(a, b), d| (a.min(*d), b.max(*d)));
            if hi / lo > 1.2 {
                continue;
            }
            checked += 1;
            let obs: Vec<_> = ts
                .iter()
                .map(|t| Observation::new(*t, project(&cam, simulate_flight(&flight, *t)).unwrap()))
                .collect();
            let traj = fit_position(&obs).unwrap();
            for o in &obs {
                worst = worst.max(traj.position(o.t).distance(o.position));
            }
        }
        assert!(worst <= 0.2, "worst residual {worst}");
    }

    #[test]
    fn render_heatmap_without_noise_is_exact() {
        let label = BlurLabel::new(Point2::new(30.0, 20.0), 0.4, 7.0);
        let size = RasterSize::new(64, 48);
        let params = HeatmapParams::default();
        let direct = real_blur_map(&blur_endpoints(&label), &params, size).unwrap();
        let rendered = render_heatmap(
            Some(&label),
            &params,
            size,
            &HeatmapNoise::default(),
            &mut rng(1),
        )
        .unwrap();
        assert_eq!(direct, rendered);
    }

    #[test]
    fn distractor_yields_second_candidate() {
        let label = BlurLabel::new(Point2::new(30.0, 20.0), 0.4, 7.0);
        let noise = HeatmapNoise {
            distractors: vec![(BlurLabel::sharp(Point2::new(100.0, 40.0)), 0.9)],
            ..HeatmapNoise::default()
        };
        let hm = render_heatmap(
            Some(&label),
            &HeatmapParams::default(),
            RasterSize::new(128, 64),
            &noise,
            &mut rng(1),
        )
        .unwrap();
        assert_eq!(detect(&hm, &DetectParams::default()).len(), 2);
    }

    #[test]
    fn noisy_heatmaps_still_localize() {
        let mut r = rng(99);
        let size = RasterSize::new(128, 96);
        let params = HeatmapParams::default();
        let noise = HeatmapNoise {
            uniform: 0.2,
            ..HeatmapNoise::default()
        };
        let mut hits = 0;
        for _ in 0..500 {
            let label = random_label(&mut r, size, (0.0, 30.0), 4.0);
            let hm = render_heatmap(Some(&label), &params, size, &noise, &mut r).unwrap();
            let dets = detect(&hm, &DetectParams::default());
            if dets
                .first()
                .is_some_and(|d| d.position().distance(label.center) <= 1.0)
            {
                hits += 1;
            }
        }
        assert!(hits as f64 >= 0.95 * 500.0, "{hits}/500");
    }

    #[test]
    fn single_disc_without_blur() {
        let bg = GrayFrame::filled(40, 40, 0.2);
        let (frame, reference) = render_gray_frames(
            &BlurLabel::sharp(Point2::new(20.0, 20.0)),
            &bg,
            &BallAppearance::default(),
            None,
        );
        assert_eq!(reference, bg);
        assert!((frame.get(20, 20) - 0.95).abs() < 1e-12);
        // symmetric disc
        assert!((frame.get(17, 20) - frame.get(23, 20)).abs() < 1e-12);
        assert!((frame.get(20, 17) - frame.get(20, 23)).abs() < 1e-12);
    }

    #[test]
    fn exposure_averaging_conserves_mass() {
        let bg = GrayFrame::filled(120, 80, 0.2);
        let ball = BallAppearance::default();
        let mass = |l: f64| {
            let (frame, _) = render_gray_frames(
                &BlurLabel::new(Point2::new(60.3, 40.1), 0.37, l),
                &bg,
                &ball,
                None,
            );
            frame.values().iter().map(|v| v - 0.2).sum::<f64>()
        };
        let reference = mass(0.0);
        for l in [2.0, 5.0, 10.0, 20.0, 30.0] {
            let m = mass(l);
            assert!(
                (m - reference).abs() <= 0.02 * reference,
                "l={l}: {m} vs {reference}"
            );
        }
    }

    #[test]
    fn baseline_on_clean_moving_disc() {
        let bg = GrayFrame::filled(160, 100, 0.3);
        let label = BlurLabel::new(Point2::new(80.0, 50.0), 0.0, 8.0);
        // reference ball far outside the ROI
        let far = BlurLabel::new(Point2::new(10.0, 10.0), 0.0, 8.0);
        let (frame, reference) =
            render_gray_frames(&label, &bg, &BallAppearance::default(), Some(&far));
        let est =
            baseline_blur(&frame, &reference, label.center, &BaselineParams::default()).unwrap();
        assert!(orientation_distance(est.theta, 0.0).to_degrees() <= 5.0);
        assert!(
            (est.half_length - 8.0).abs() <= 2.5,
            "l = {}",
            est.half_length
        );
    }

    #[test]
    fn baseline_on_stationary_ball() {
        let bg = GrayFrame::filled(100, 100, 0.3);
        let label = BlurLabel::sharp(Point2::new(50.0, 50.0));
        let (frame, reference) =
            render_gray_frames(&label, &bg, &BallAppearance::default(), Some(&label));
        assert_eq!(
            baseline_blur(&frame, &reference, label.center, &BaselineParams::default()),
            Err(BaselineError::NoBlurFound)
        );
    }

    #[test]
    fn baseline_recovers_angle_on_rendered_streaks() {
        // A streak spreads the ball over ~2l / 2r times more pixels, so long
        // streaks need enough contrast to stay above the difference threshold.
        let mut r = rng(8);
        let bg = GrayFrame::filled(160, 120, 0.1);
        let ball = BallAppearance {
            radius: 3.0,
            intensity: 1.0,
        };
        for _ in 0..50 {
            let label = random_label(&mut r, RasterSize::new(160, 120), (5.0, 20.0), 12.0);
            let (frame, reference) = render_gray_frames(&label, &bg, &ball, None);
            let est = baseline_blur(&frame, &reference, label.center, &BaselineParams::default())
                .unwrap_or_else(|e| panic!("{label:?}: {e}"));
            assert!(orientation_distance(est.theta, label.theta).to_degrees() <= 5.0);
        }
    }

    #[test]
    fn frame_difference_covers_streak_support() {
        let bg = GrayFrame::filled(120, 80, 0.3);
        let label = BlurLabel::new(Point2::new(60.0, 40.0), 0.3, 10.0);
        let earlier = BlurLabel::new(Point2::new(20.0, 28.0), 0.3, 10.0);
        let ball = BallAppearance {
            radius: 3.0,
            intensity: 1.0,
        };
        let (frame, reference) = render_gray_frames(&label, &bg, &ball, Some(&earlier));
        let mask = crate::baseline::frame_diff_mask(&frame, &reference, 0.1).unwrap();
        let (ref_only, _) = render_gray_frames(&earlier, &bg, &ball, None);
        for y in 0..80 {
            for x in 0..120 {
                let streak = frame.get(x, y) - 0.3 > 0.1;
                let overlap = ref_only.get(x, y) - 0.3 > 0.0;
                if streak && !overlap {
                    assert!(mask.get(x, y), "({x},{y})");
                }
            }
        }
    }

    #[test]
    fn blur_velocity_is_half_image_speed_for_chord_labels() {
        // Chord labels have l = |v| t_exp / 2, so l / t_exp is half the speed.
        let mut r = rng(17);
        let cam = broadcast_camera(1280, 720);
        let rec = Recording::default();
        for _ in 0..50 {
            let flight = random_flight(&mut r);
            let t = 0.05;
            let label = ground_truth_blur(&flight, &cam, t, rec.t_exp).unwrap();
            let h = 1e-5;
            let v = (project(&cam, simulate_flight(&flight, t + h)).unwrap()
                - project(&cam, simulate_flight(&flight, t - h)).unwrap())
                * (0.5 / h);
            let bv = blur_velocity(label.half_length, label.theta, rec.t_exp).unwrap() * 2.0;
            assert!((bv - v).norm() <= 0.1 * v.norm(), "{bv:?} vs {v:?}");
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let cfg = ClipConfig {
            frames: 4,
            noise: 0.1,
            render_frames: true,
            size: RasterSize::new(128, 72),
            ..ClipConfig::default()
        };
        let a = simulate_clip(&cfg, &mut rng(7)).unwrap();
        let b = simulate_clip(&cfg, &mut rng(7)).unwrap();
        assert_eq!(a, b);
        let c = simulate_clip(&cfg, &mut rng(8)).unwrap();
        assert_ne!(a, c);
    }
}
