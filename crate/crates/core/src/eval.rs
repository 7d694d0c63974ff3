//! Detection and blur-quality metrics.
//!
//! A frame is a true positive when the prediction lies within `tau` pixels of
//! the ground truth. A prediction farther away, or one on a frame without a
//! ball, is a false positive. Accuracy counts true negatives (frames without a
//! ball and without a prediction).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{detect, DetectParams, Detection};
use crate::geometry::{orientation_distance, to_front_label, BlurLabel, Point2};
use crate::heatmap::Heatmap;

pub const DEFAULT_TAU: f64 = 4.0;
/// Predictions with a shorter half-length carry no usable angle.
pub const MIN_ANGLE_HALF_LENGTH: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no prediction/ground-truth pairs")]
    Empty,
    #[error("no-eligible-angles: no prediction has a half-length above {0} px")]
    NoEligibleAngles(f64),
}

/// Which point of a label is compared against the distance threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelConvention {
    #[default]
    Midpoint,
    Front,
}

impl LabelConvention {
    pub fn anchor(self, label: &BlurLabel) -> Point2 {
        match self {
            LabelConvention::Midpoint => label.center,
            LabelConvention::Front => to_front_label(label),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameOutcome {
    TruePositive {
        distance: f64,
    },
    /// `distance` is present when the frame had a ball.
    FalsePositive {
        distance: Option<f64>,
    },
    TrueNegative,
    FalseNegative,
}

impl FrameOutcome {
    pub fn is_true_positive(&self) -> bool {
        matches!(self, FrameOutcome::TruePositive { .. })
    }
}

/// Classifies one frame. The threshold is inclusive.
pub fn classify_frame(
    pred: Option<&BlurLabel>,
    gt: Option<&BlurLabel>,
    tau: f64,
    convention: LabelConvention,
) -> FrameOutcome {
    match (pred, gt) {
        (Some(p), Some(g)) => {
            let distance = convention.anchor(p).distance(convention.anchor(g));
            if distance <= tau {
                FrameOutcome::TruePositive { distance }
            } else {
                FrameOutcome::FalsePositive {
                    distance: Some(distance),
                }
            }
        }
        (Some(_), None) => FrameOutcome::FalsePositive { distance: None },
        (None, Some(_)) => FrameOutcome::FalseNegative,
        (None, None) => FrameOutcome::TrueNegative,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, outcome: &FrameOutcome) {
        match outcome {
            FrameOutcome::TruePositive { .. } => self.tp += 1,
            FrameOutcome::FalsePositive { .. } => self.fp += 1,
            FrameOutcome::TrueNegative => self.tn += 1,
            FrameOutcome::FalseNegative => self.fn_ += 1,
        }
    }
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<MeanStd> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(MeanStd {
            mean,
            std: var.sqrt(),
            n: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Absent when predictions carry no confidence.
    pub ap: Option<f64>,
    pub mae_l: Option<MeanStd>,
    /// Degrees.
    pub mae_theta: Option<MeanStd>,
    pub counts: Counts,
    /// Notes on guarded divisions and skipped metrics.
    pub flags: Vec<String>,
}

fn ratio(num: usize, den: usize, name: &str, flags: &mut Vec<String>) -> f64 {
    if den == 0 {
        flags.push(format!("{name}-undefined"));
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision, recall, F1 and accuracy. Zero denominators yield 0 and a flag.
pub fn aggregate(outcomes: &[FrameOutcome]) -> MetricsReport {
    let mut counts = Counts::default();
    for o in outcomes {
        counts.add(o);
    }
    report_from_counts(counts)
}

pub fn report_from_counts(counts: Counts) -> MetricsReport {
    let mut flags = Vec::new();
    let precision = ratio(counts.tp, counts.tp + counts.fp, "precision", &mut flags);
    let recall = ratio(counts.tp, counts.tp + counts.fn_, "recall", &mut flags);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        flags.push("f1-undefined".into());
        0.0
    };
    let accuracy = ratio(
        counts.tp + counts.tn,
        counts.total(),
        "accuracy",
        &mut flags,
    );
    MetricsReport {
        precision,
        recall,
        f1,
        accuracy,
        ap: None,
        mae_l: None,
        mae_theta: None,
        counts,
        flags,
    }
}

/// One point of a precision-recall curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub confidence: f64,
    pub precision: f64,
    pub recall: f64,
}

/// All-point interpolated average precision of an already ranked list of
/// hits, and the raw curve.
pub fn average_precision_ranked(hits: &[bool], n_ground_truth: usize) -> f64 {
    if n_ground_truth == 0 {
        return 0.0;
    }
    let mut tp = 0usize;
    let mut precision = Vec::with_capacity(hits.len());
    let mut recall = Vec::with_capacity(hits.len());
    for (i, hit) in hits.iter().enumerate() {
        if *hit {
            tp += 1;
        }
        precision.push(tp as f64 / (i + 1) as f64);
        recall.push(tp as f64 / n_ground_truth as f64);
    }
    // precision envelope
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (p, r) in precision.iter().zip(&recall) {
        ap += (r - prev_recall) * p;
        prev_recall = *r;
    }
    ap
}

/// Ranks `(confidence, hit)` pairs by descending confidence (stable) and
/// returns the AP with its PR curve.
pub fn average_precision(scored: &[(f64, bool)], n_ground_truth: usize) -> (f64, Vec<PrPoint>) {
    let mut ranked = scored.to_vec();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    let hits: Vec<bool> = ranked.iter().map(|(_, h)| *h).collect();
    let ap = average_precision_ranked(&hits, n_ground_truth);
    let mut tp = 0usize;
    let curve = ranked
        .iter()
        .enumerate()
        .map(|(i, (confidence, hit))| {
            tp += usize::from(*hit);
            PrPoint {
                confidence: *confidence,
                precision: tp as f64 / (i + 1) as f64,
                recall: if n_ground_truth == 0 {
                    0.0
                } else {
                    tp as f64 / n_ground_truth as f64
                },
            }
        })
        .collect();
    (ap, curve)
}

/// Half-length error over all `(prediction, ground truth)` pairs.
pub fn length_mae(pairs: &[(BlurLabel, BlurLabel)]) -> Result<MeanStd, EvalError> {
    let errors: Vec<f64> = pairs
        .iter()
        .map(|(p, g)| (p.half_length - g.half_length).abs())
        .collect();
    MeanStd::of(&errors).ok_or(EvalError::Empty)
}

/// Orientation error in degrees, `min(|Δθ|, 180° - |Δθ|)`, over pairs whose
/// predicted half-length exceeds `min_half_length`.
pub fn angle_mae(
    pairs: &[(BlurLabel, BlurLabel)],
    min_half_length: f64,
) -> Result<MeanStd, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::Empty);
    }
    let errors: Vec<f64> = pairs
        .iter()
        .filter(|(p, _)| p.half_length > min_half_length)
        .map(|(p, g)| orientation_distance(p.theta, g.theta).to_degrees())
        .collect();
    MeanStd::of(&errors).ok_or(EvalError::NoEligibleAngles(min_half_length))
}

/// `(mae_l, mae_theta)` over paired true-positive frames.
pub fn blur_mae(pairs: &[(BlurLabel, BlurLabel)]) -> Result<(MeanStd, MeanStd), EvalError> {
    Ok((length_mae(pairs)?, angle_mae(pairs, MIN_ANGLE_HALF_LENGTH)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub tau: f64,
    pub convention: LabelConvention,
    /// Count every candidate beyond the selected one as a false positive.
    pub count_extra_candidates: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            convention: LabelConvention::Midpoint,
            count_extra_candidates: false,
        }
    }
}

/// The selected prediction of a frame and its ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FramePrediction {
    pub gt: Option<BlurLabel>,
    pub pred: Option<BlurLabel>,
    pub confidence: Option<f64>,
    /// Candidates that were not selected.
    pub extra_candidates: usize,
}

impl FramePrediction {
    /// Keeps the first detection (highest confidence after [`detect`]).
    pub fn from_detections(gt: Option<BlurLabel>, detections: &[Detection]) -> Self {
        let first = detections.first();
        Self {
            gt,
            pred: first.map(|d| d.label),
            confidence: first.map(|d| d.confidence),
            extra_candidates: detections.len().saturating_sub(1),
        }
    }
}

/// Full report: detection rates, AP (when every prediction has a confidence)
/// and blur errors over true positives.
pub fn evaluate(frames: &[FramePrediction], config: &EvalConfig) -> MetricsReport {
    let mut counts = Counts::default();
    let mut scored = Vec::new();
    let mut confidences_complete = true;
    let mut pairs = Vec::new();
    for f in frames {
        let outcome = classify_frame(
            f.pred.as_ref(),
            f.gt.as_ref(),
            config.tau,
            config.convention,
        );
        counts.add(&outcome);
        if config.count_extra_candidates {
            counts.fp += f.extra_candidates;
        }
        if f.pred.is_some() {
            match f.confidence {
                Some(c) => scored.push((c, outcome.is_true_positive())),
                None => confidences_complete = false,
            }
        }
        if let (FrameOutcome::TruePositive { .. }, Some(p), Some(g)) = (outcome, f.pred, f.gt) {
            pairs.push((p, g));
        }
    }
    let mut report = report_from_counts(counts);
    let n_gt = frames.iter().filter(|f| f.gt.is_some()).count();
    if confidences_complete {
        report.ap = Some(average_precision(&scored, n_gt).0);
    } else {
        report.flags.push("ap-unavailable".into());
    }
    match length_mae(&pairs) {
        Ok(m) => report.mae_l = Some(m),
        Err(e) => report.flags.push(format!("mae-l: {e}")),
    }
    match angle_mae(&pairs, MIN_ANGLE_HALF_LENGTH) {
        Ok(m) => report.mae_theta = Some(m),
        Err(e) => report.flags.push(format!("mae-theta: {e}")),
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub report: MetricsReport,
}

/// Re-runs detection and evaluation for every threshold.
pub fn threshold_sweep(
    frames: &[(Heatmap, Option<BlurLabel>)],
    deltas: &[f64],
    detect_params: &DetectParams,
    config: &EvalConfig,
) -> Vec<SweepRow> {
    deltas
        .iter()
        .map(|&delta| {
            let params = DetectParams {
                delta,
                ..*detect_params
            };
            let predictions: Vec<FramePrediction> = frames
                .iter()
                .map(|(hm, gt)| FramePrediction::from_detections(*gt, &detect(hm, &params)))
                .collect();
            SweepRow {
                delta,
                report: evaluate(&predictions, config),
            }
        })
        .collect()
}
