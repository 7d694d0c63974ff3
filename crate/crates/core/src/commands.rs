//! Command-line surface.
//!
//! Every subcommand prints a report to stdout, as aligned text or as a JSON
//! object carrying `"schema": 1`. Exit codes: 0 on success, 2 for invalid
//! arguments, 1 for runtime failures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::baseline::{baseline_blur, BaselineParams, GrayFrame};
use crate::camera::{calibrate_pnp, table_keypoints, Keypoint2D3D};
use crate::dataset::{compute_stats, load_clips};
use crate::eval::{
    average_precision, evaluate, threshold_sweep, EvalConfig, FramePrediction, LabelConvention,
    SweepRow,
};
use crate::extract::{detect, DetectParams, Tracker, TrackerConfig};
use crate::geometry::{BlurLabel, FrameAnnotation, Point2};
use crate::heatmap::{Heatmap, RasterSize};
use crate::io::calibration::{format_calibrations, CalibrationRecord};
use crate::io::csv::{
    read_labels_csv, write_labels_csv, LabelTable, DEFAULT_DECIMALS, RELABEL_DECIMALS,
};
use crate::io::fixtures::{read_bundle, write_bundle};
use crate::io::raster::{load_gray_frame, load_heatmap};
use crate::io::report::{json_report, metrics_text, pr_curve_csv, sweep_csv, sweep_text};
use crate::io::{read_text, write_atomic, IoError};
use crate::synth::{rng, simulate_clip, ClipConfig, Recording};
use crate::trajectory::{fit_position, fit_position_blur, mae, BlurFitOptions, Observation};

#[derive(Debug, Parser)]
#[command(
    name = "blurtrack",
    version,
    about = "Blur-aware ball tracking toolkit"
)]
pub struct Cli {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a seeded synthetic clip as a fixture bundle.
    Render(RenderArgs),
    /// Detect balls and blur in heatmaps.
    Extract(ExtractArgs),
    /// Estimate blur by frame differencing around known ball positions.
    Baseline(BaselineArgs),
    /// Fit trajectories to the first frames of a clip and score the prediction.
    Fit(FitArgs),
    /// Score predictions against ground truth, or sweep detection thresholds.
    Eval(EvalArgs),
    /// Convert label files between midpoint and front conventions.
    Relabel(RelabelArgs),
    /// Calibrate a camera from table keypoints.
    Calibrate(CalibrateArgs),
    /// Blur and displacement statistics of label files.
    Stats(StatsArgs),
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1)"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is not positive"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is negative"))
    }
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub seed: u64,
    /// Bundle directory.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub frames: usize,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 288)]
    pub height: usize,
    /// Uniform heatmap noise amplitude.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    pub noise: f64,
    #[arg(long, default_value_t = 60.0, value_parser = positive)]
    pub fps: f64,
    /// Shutter time, seconds.
    #[arg(long, default_value_t = 1.0 / 240.0, value_parser = positive)]
    pub exposure: f64,
    /// Also render grayscale frames.
    #[arg(long)]
    pub with_frames: bool,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Fixture bundle, heatmap file (.f32/.png/.pgm) or directory of heatmaps.
    #[arg(long)]
    pub input: PathBuf,
    /// Label CSV with a Confidence column.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub delta: f64,
    #[arg(long, default_value_t = 2)]
    pub min_area: usize,
    /// Select among candidates with the constant-velocity tracker instead of
    /// taking the most confident one.
    #[arg(long)]
    pub track: bool,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Fixture bundle with frames, or a directory of frame images.
    #[arg(long)]
    pub input: PathBuf,
    /// Ball positions; defaults to the bundle labels.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 40)]
    pub roi: usize,
    #[arg(long, default_value_t = 0.1, value_parser = unit_interval)]
    pub threshold: f64,
    /// Frames between the current and the reference frame.
    #[arg(long, default_value_t = 2)]
    pub offset: u32,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Label CSV of one trajectory.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub window: usize,
    /// Frames after the window that are predicted and scored.
    #[arg(long, default_value_t = 15)]
    pub horizon: u64,
    #[arg(long, default_value_t = 30.0, value_parser = positive)]
    pub fps: f64,
    #[arg(long, default_value_t = 0.2, value_parser = non_negative)]
    pub blur_weight: f64,
    /// Fit each axis with its own exposure.
    #[arg(long)]
    pub separate_axes: bool,
    /// Write the fitted coefficients as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Mid,
    Front,
}

impl From<ConventionArg> for LabelConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Mid => LabelConvention::Midpoint,
            ConventionArg::Front => LabelConvention::Front,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Prediction CSV, or a fixture bundle to detect on.
    #[arg(long)]
    pub input: PathBuf,
    /// Ground-truth CSV (not needed for bundles).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 4.0, value_parser = positive)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub delta: f64,
    /// Comma-separated thresholds to sweep (bundles only).
    #[arg(long, value_delimiter = ',', value_parser = unit_interval)]
    pub deltas: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = ConventionArg::Mid)]
    pub convention: ConventionArg,
    /// Count unselected candidates as false positives.
    #[arg(long)]
    pub count_extra: bool,
    /// Write the PR curve, or the sweep table, as CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RelabelArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Target convention; the input is assumed to use the other one.
    #[arg(long, value_enum)]
    pub to: ConventionArg,
    #[arg(long, default_value_t = RELABEL_DECIMALS)]
    pub decimals: usize,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Keypoint file: `u v` per line in table-keypoint order, or `X Y Z u v`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    #[arg(long, default_value = "camera")]
    pub id: String,
    /// Calibration file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Label CSV or a directory searched recursively for CSVs.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub bin_width: f64,
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Runtime(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CommandError {
    CommandError::Runtime(e.to_string())
}

/// A finished command: the JSON body and its text rendering.
pub struct Report {
    pub kind: &'static str,
    pub body: Value,
    pub text: String,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let v = json_report(self.kind, &self.body).expect("reports are valid JSON");
                let mut s = serde_json::to_string_pretty(&v).expect("reports are valid JSON");
                s.push('\n');
                s
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<Report, CommandError> {
    match &cli.command {
        Command::Render(a) => render(a),
        Command::Extract(a) => extract(a),
        Command::Baseline(a) => baseline(a),
        Command::Fit(a) => fit(a),
        Command::Eval(a) => eval(a),
        Command::Relabel(a) => relabel(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Stats(a) => stats(a),
    }
}

/// Parses the process arguments, runs, prints, and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn is_bundle(path: &Path) -> bool {
    path.join("manifest.json").is_file()
}

fn render(a: &RenderArgs) -> Result<Report, CommandError> {
    if a.width == 0 || a.height == 0 || a.frames == 0 {
        return Err(CommandError::Usage(
            "--width, --height and --frames must be positive".into(),
        ));
    }
    let config = ClipConfig {
        size: RasterSize::new(a.width, a.height),
        frames: a.frames,
        recording: Recording {
            fps: a.fps,
            t_exp: a.exposure,
        },
        noise: a.noise,
        render_frames: a.with_frames,
        ..ClipConfig::default()
    };
    let frames = simulate_clip(&config, &mut rng(a.seed)).map_err(runtime)?;
    let manifest = write_bundle(&a.output, a.seed, &config, &frames)?;
    let visible = frames.iter().filter(|f| f.label.is_some()).count();
    Ok(Report {
        kind: "render",
        body: json!({ "output": a.output, "frames": manifest.frames.len(), "visible": visible, "seed": a.seed }),
        text: format!(
            "wrote {} frames ({visible} with ball) to {}\n",
            manifest.frames.len(),
            a.output.display()
        ),
    })
}

/// Frame-indexed heatmaps from a bundle, a single file or a directory.
fn load_heatmaps(input: &Path) -> Result<Vec<(u64, Heatmap)>, CommandError> {
    if is_bundle(input) {
        let bundle = read_bundle(input)?;
        return Ok(bundle
            .manifest
            .frames
            .iter()
            .map(|f| f.frame_index)
            .zip(bundle.heatmaps)
            .collect());
    }
    if input.is_file() {
        return Ok(vec![(0, load_heatmap(input)?)]);
    }
    let files = image_files(input, &["f32", "png", "pgm"])?;
    files
        .into_iter()
        .map(|(index, path)| Ok((index, load_heatmap(&path)?)))
        .collect()
}

/// Sorted files with the given extensions, indexed by the digits in their
/// stem (or by position when a stem has none).
fn image_files(dir: &Path, extensions: &[&str]) -> Result<Vec<(u64, PathBuf)>, CommandError> {
    let entries = std::fs::read_dir(dir).map_err(|e| IoError::file(dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| extensions.iter().any(|x| x.eq_ignore_ascii_case(e)))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CommandError::Usage(format!(
            "no input files in {}",
            dir.display()
        )));
    }
    let digits = |p: &Path| -> Option<u64> {
        let stem = p.file_stem()?.to_str()?;
        let d: String = stem.chars().filter(char::is_ascii_digit).collect();
        d.parse().ok()
    };
    let indexed: Option<Vec<u64>> = files.iter().map(|p| digits(p)).collect();
    Ok(match indexed {
        Some(idx) => idx.into_iter().zip(files).collect(),
        None => files
            .into_iter()
            .enumerate()
            .map(|(i, p)| (i as u64, p))
            .collect(),
    })
}

fn extract(a: &ExtractArgs) -> Result<Report, CommandError> {
    let heatmaps = load_heatmaps(&a.input)?;
    let params = DetectParams {
        delta: a.delta,
        min_area: a.min_area,
    };
    let mut tracker = Tracker::new(TrackerConfig::default());
    let mut rows = Vec::new();
    let mut confidence = Vec::new();
    let mut candidates = 0;
    for (index, hm) in &heatmaps {
        let dets = detect(hm, &params);
        candidates += dets.len();
        let chosen = if a.track {
            tracker.update(*index, &dets)
        } else {
            dets.first().copied()
        };
        rows.push(FrameAnnotation {
            frame_index: *index,
            label: chosen.map(|d| d.label),
        });
        confidence.push(chosen.map_or(0.0, |d| d.confidence));
    }
    let detected = rows.iter().filter(|r| r.label.is_some()).count();
    let table = LabelTable {
        confidence: Some(confidence),
        ..LabelTable::new(rows)
    };
    if let Some(out) = &a.output {
        write_labels_csv(out, &table, RELABEL_DECIMALS)?;
    }
    let detections: Vec<Value> = table
        .rows
        .iter()
        .zip(table.confidence.as_deref().unwrap_or_default())
        .map(|(r, c)| {
            json!({
                "frame": r.frame_index,
                "label": r.label,
                "confidence": r.label.map(|_| *c),
            })
        })
        .collect();
    Ok(Report {
        kind: "extract",
        body: json!({ "frames": heatmaps.len(), "detected": detected, "candidates": candidates, "detections": detections }),
        text: format!(
            "{} frames, {detected} with a ball, {candidates} candidates at delta {}\n",
            heatmaps.len(),
            a.delta
        ),
    })
}

fn baseline(a: &BaselineArgs) -> Result<Report, CommandError> {
    let (frames, labels): (BTreeMap<u64, GrayFrame>, LabelTable) = if is_bundle(&a.input) {
        let bundle = read_bundle(&a.input)?;
        let frames = bundle
            .manifest
            .frames
            .iter()
            .zip(bundle.frames)
            .filter_map(|(e, f)| f.map(|f| (e.frame_index, f)))
            .collect();
        let labels = match &a.labels {
            Some(p) => read_labels_csv(p)?,
            None => bundle.labels,
        };
        (frames, labels)
    } else {
        let labels = a.labels.as_ref().ok_or_else(|| {
            CommandError::Usage("--labels is required for image directories".into())
        })?;
        let frames = image_files(&a.input, &["png", "pgm", "ppm", "pnm"])?
            .into_iter()
            .map(|(i, p)| Ok((i, load_gray_frame(&p)?)))
            .collect::<Result<_, CommandError>>()?;
        (frames, read_labels_csv(labels)?)
    };
    if frames.is_empty() {
        return Err(CommandError::Usage("input has no frames".into()));
    }
    let params = BaselineParams {
        roi_half_size: a.roi,
        diff_threshold: a.threshold,
        reference_offset: a.offset,
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for row in &labels.rows {
        let estimate = row.label.and_then(|l| {
            let current = frames.get(&row.frame_index)?;
            let reference = frames.get(&row.frame_index.checked_sub(a.offset as u64)?)?;
            match baseline_blur(current, reference, l.center, &params) {
                Ok(b) => Some(b),
                Err(e) => {
                    failures.push(json!({ "frame": row.frame_index, "error": e.to_string() }));
                    None
                }
            }
        });
        rows.push(FrameAnnotation {
            frame_index: row.frame_index,
            label: estimate,
        });
    }
    let estimated = rows.iter().filter(|r| r.label.is_some()).count();
    if let Some(out) = &a.output {
        write_labels_csv(out, &LabelTable::new(rows.clone()), RELABEL_DECIMALS)?;
    }
    Ok(Report {
        kind: "baseline",
        body: json!({ "estimated": estimated, "failures": failures, "labels": rows }),
        text: format!("{estimated} blur estimates, {} failures\n", failures.len()),
    })
}

fn fit(a: &FitArgs) -> Result<Report, CommandError> {
    if a.window < 3 {
        return Err(CommandError::Usage("--window must be at least 3".into()));
    }
    let table = read_labels_csv(&a.input)?;
    let visible: Vec<(u64, BlurLabel)> = table
        .rows
        .iter()
        .filter_map(|r| r.label.map(|l| (r.frame_index, l)))
        .collect();
    if visible.len() < a.window {
        return Err(runtime(format!(
            "{} visible frames, need at least {}",
            visible.len(),
            a.window
        )));
    }
    let time = |frame: u64| frame as f64 / a.fps;
    let observations: Vec<Observation> = visible[..a.window]
        .iter()
        .map(|(f, l)| Observation::with_blur(time(*f), l.center, l.half_length, l.theta))
        .collect();
    let last = visible[a.window - 1].0;
    let remaining: Vec<(f64, Point2)> = visible[a.window..]
        .iter()
        .filter(|(f, _)| *f <= last + a.horizon)
        .map(|(f, l)| (time(*f), l.center))
        .collect();
    let position = fit_position(&observations).map_err(runtime)?;
    let options = BlurFitOptions {
        blur_weight: a.blur_weight,
        joint: !a.separate_axes,
        ..BlurFitOptions::default()
    };
    let blur = fit_position_blur(&observations, &options).map_err(runtime)?;
    let score = |t| {
        if remaining.is_empty() {
            None
        } else {
            mae(t, &remaining).ok()
        }
    };
    let (mae_position, mae_blur) = (score(&position), score(&blur.trajectory));
    if let Some(out) = &a.output {
        let body = json!({ "position": position, "blur": blur });
        let text = serde_json::to_string_pretty(&json_report("fit", &body).map_err(runtime)?)
            .map_err(runtime)?;
        write_atomic(out, text.as_bytes())?;
    }
    let fmt = |m: Option<f64>| m.map_or("n/a".to_string(), |v| format!("{v:.3}"));
    let mut text = format!(
        "{:<18} {}\n{:<18} {}\n{:<18} {:.6} s\n{:<18} {}\n",
        "mae position [px]",
        fmt(mae_position),
        "mae blur [px]",
        fmt(mae_blur),
        "exposure",
        blur.trajectory.t_exp.unwrap_or(0.0),
        "scored frames",
        remaining.len()
    );
    if blur.fallback {
        text.push_str("blur fit fell back to the position-only fit\n");
    }
    if blur.exposure_at_bound {
        text.push_str("exposure estimate hit a bound\n");
    }
    Ok(Report {
        kind: "fit",
        body: json!({
            "mae_position": mae_position,
            "mae_blur": mae_blur,
            "scored_frames": remaining.len(),
            "position": position,
            "blur": blur,
        }),
        text,
    })
}

fn eval(a: &EvalArgs) -> Result<Report, CommandError> {
    let config = EvalConfig {
        tau: a.tau,
        convention: a.convention.into(),
        count_extra_candidates: a.count_extra,
    };
    if is_bundle(&a.input) {
        let bundle = read_bundle(&a.input)?;
        let gt: BTreeMap<u64, Option<BlurLabel>> = match &a.labels {
            Some(p) => read_labels_csv(p)?,
            None => bundle.labels,
        }
        .rows
        .iter()
        .map(|r| (r.frame_index, r.label))
        .collect();
        let frames: Vec<(Heatmap, Option<BlurLabel>)> = bundle
            .manifest
            .frames
            .iter()
            .zip(bundle.heatmaps)
            .map(|(e, hm)| (hm, gt.get(&e.frame_index).copied().flatten()))
            .collect();
        let deltas = a.deltas.clone().unwrap_or_else(|| vec![a.delta]);
        let rows = threshold_sweep(&frames, &deltas, &DetectParams::default(), &config);
        return sweep_report(&rows, a.output.as_deref());
    }
    if a.deltas.is_some() {
        return Err(CommandError::Usage(
            "--deltas needs a fixture bundle as --input".into(),
        ));
    }
    let labels = a
        .labels
        .as_ref()
        .ok_or_else(|| CommandError::Usage("--labels is required for CSV predictions".into()))?;
    let preds = read_labels_csv(&a.input)?;
    let gts = read_labels_csv(labels)?;
    let by_frame: BTreeMap<u64, (Option<BlurLabel>, Option<f64>)> = preds
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            (
                r.frame_index,
                (r.label, preds.confidence.as_ref().map(|c| c[i])),
            )
        })
        .collect();
    let frames: Vec<FramePrediction> = gts
        .rows
        .iter()
        .map(|g| {
            let (pred, confidence) = by_frame
                .get(&g.frame_index)
                .copied()
                .unwrap_or((None, None));
            FramePrediction {
                gt: g.label,
                pred,
                confidence: pred.and(confidence),
                extra_candidates: 0,
            }
        })
        .collect();
    let report = evaluate(&frames, &config);
    if let Some(out) = &a.output {
        let scored: Vec<(f64, bool)> = frames
            .iter()
            .filter_map(|f| {
                let c = f.confidence?;
                let hit = crate::eval::classify_frame(
                    f.pred.as_ref(),
                    f.gt.as_ref(),
                    config.tau,
                    config.convention,
                )
                .is_true_positive();
                Some((c, hit))
            })
            .collect();
        let n_gt = frames.iter().filter(|f| f.gt.is_some()).count();
        write_atomic(
            out,
            pr_curve_csv(&average_precision(&scored, n_gt).1).as_bytes(),
        )?;
    }
    Ok(Report {
        kind: "metrics",
        text: metrics_text(&report),
        body: serde_json::to_value(&report).map_err(runtime)?,
    })
}

fn sweep_report(rows: &[SweepRow], output: Option<&Path>) -> Result<Report, CommandError> {
    if let Some(out) = output {
        write_atomic(out, sweep_csv(rows).as_bytes())?;
    }
    if let [row] = rows {
        return Ok(Report {
            kind: "metrics",
            text: metrics_text(&row.report),
            body: serde_json::to_value(&row.report).map_err(runtime)?,
        });
    }
    Ok(Report {
        kind: "threshold_sweep",
        text: sweep_text(rows),
        body: json!({ "rows": rows }),
    })
}

fn relabel(a: &RelabelArgs) -> Result<Report, CommandError> {
    let table = read_labels_csv(&a.input)?;
    let out = crate::io::csv::relabel(&table, a.to.into());
    write_labels_csv(&a.output, &out, a.decimals.max(DEFAULT_DECIMALS))?;
    let moved = out.rows.iter().filter(|r| r.label.is_some()).count();
    Ok(Report {
        kind: "relabel",
        body: json!({ "rows": out.rows.len(), "converted": moved, "output": a.output }),
        text: format!(
            "converted {moved} of {} rows into {}\n",
            out.rows.len(),
            a.output.display()
        ),
    })
}

fn parse_keypoints(text: &str) -> Result<Vec<Keypoint2D3D>, CommandError> {
    let table = table_keypoints();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| runtime(format!("line {}: not a number", i + 1)))?;
        let kp = match values.as_slice() {
            [u, v] => {
                let world = *table.get(out.len()).ok_or_else(|| {
                    runtime(format!(
                        "line {}: more than {} table keypoints",
                        i + 1,
                        table.len()
                    ))
                })?;
                Keypoint2D3D {
                    world,
                    image: Point2::new(*u, *v),
                }
            }
            [x, y, z, u, v] => Keypoint2D3D {
                world: [*x, *y, *z],
                image: Point2::new(*u, *v),
            },
            _ => {
                return Err(runtime(format!(
                    "line {}: expected `u v` or `X Y Z u v`",
                    i + 1
                )))
            }
        };
        out.push(kp);
    }
    Ok(out)
}

fn calibrate(a: &CalibrateArgs) -> Result<Report, CommandError> {
    if a.width == 0 || a.height == 0 {
        return Err(CommandError::Usage(
            "--width and --height must be positive".into(),
        ));
    }
    let keypoints = parse_keypoints(&read_text(&a.input)?)?;
    let calibration = calibrate_pnp(&keypoints, None, a.width, a.height).map_err(runtime)?;
    let record = CalibrationRecord::from_camera(a.id.clone(), &calibration.camera);
    if let Some(out) = &a.output {
        write_atomic(
            out,
            format_calibrations(std::slice::from_ref(&record)).as_bytes(),
        )?;
    }
    Ok(Report {
        kind: "calibrate",
        body: json!({ "calibration": record, "rms": calibration.rms }),
        text: format!(
            "{:<10} {:.3}\n{:<10} {:?}\n{:<10} {:?}\n{:<10} {:.4} px\n",
            "focal",
            record.focal,
            "rotation",
            record.rotation,
            "position",
            calibration.camera.center(),
            "rms",
            calibration.rms
        ),
    })
}

fn stats(a: &StatsArgs) -> Result<Report, CommandError> {
    let clips = load_clips(&a.input)?;
    let s = compute_stats(&clips, a.bin_width);
    let mut text = format!(
        "{:<22} {}\n{:<22} {}\n{:<22} {}\n{:<22} {:.4}\n",
        "clips", s.clips, "frames", s.frames, "visible", s.visible, "blur ratio", s.blur_ratio
    );
    if let Some(d) = s.displacement {
        text.push_str(&format!(
            "{:<22} {:.2} ± {:.2}\n",
            "displacement [px]", d.mean, d.std
        ));
    }
    if let Some(l) = s.half_length {
        text.push_str(&format!(
            "{:<22} {:.2} ± {:.2}\n",
            "half-length [px]", l.mean, l.std
        ));
    }
    Ok(Report {
        kind: "stats",
        body: serde_json::to_value(&s).map_err(runtime)?,
        text,
    })
}
