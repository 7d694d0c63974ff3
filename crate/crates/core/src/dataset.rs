//! Clip records and dataset statistics: blur ratio, frame-to-frame
//! displacement and the half-length histogram.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eval::MeanStd;
use crate::geometry::FrameAnnotation;
use crate::io::csv::read_labels_csv;
use crate::io::IoError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipRecord {
    pub clip_id: String,
    /// Sorted by frame index.
    pub annotations: Vec<FrameAnnotation>,
    pub camera: Option<String>,
    pub fps: Option<f64>,
}

impl ClipRecord {
    pub fn new(clip_id: impl Into<String>, mut annotations: Vec<FrameAnnotation>) -> Self {
        annotations.sort_by_key(|a| a.frame_index);
        Self {
            clip_id: clip_id.into(),
            annotations,
            camera: None,
            fps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub clips: usize,
    pub frames: usize,
    pub visible: usize,
    pub blurred: usize,
    /// Share of visible frames with a non-zero half-length.
    pub blur_ratio: f64,
    /// Ball displacement between consecutive frames where both are visible, px.
    pub displacement: Option<MeanStd>,
    /// Half-lengths of visible frames.
    pub half_length: Option<MeanStd>,
    pub histogram: Vec<HistogramBin>,
}

/// Statistics over all clips. `bin_width` sets the histogram resolution.
pub fn compute_stats(clips: &[ClipRecord], bin_width: f64) -> DatasetStats {
    let mut frames = 0;
    let mut lengths = Vec::new();
    let mut displacements = Vec::new();
    for clip in clips {
        frames += clip.annotations.len();
        for pair in clip.annotations.windows(2) {
            if let (Some(a), Some(b)) = (pair[0].label, pair[1].label) {
                if pair[1].frame_index == pair[0].frame_index + 1 {
                    displacements.push(a.center.distance(b.center));
                }
            }
        }
        lengths.extend(
            clip.annotations
                .iter()
                .filter_map(|a| a.label)
                .map(|l| l.half_length),
        );
    }
    let visible = lengths.len();
    let blurred = lengths.iter().filter(|l| **l > 0.0).count();
    DatasetStats {
        clips: clips.len(),
        frames,
        visible,
        blurred,
        blur_ratio: if visible == 0 {
            0.0
        } else {
            blurred as f64 / visible as f64
        },
        displacement: MeanStd::of(&displacements),
        half_length: MeanStd::of(&lengths),
        histogram: histogram(&lengths, bin_width),
    }
}

/// Bins `[k w, (k + 1) w)` from zero up to the largest value.
pub fn histogram(values: &[f64], bin_width: f64) -> Vec<HistogramBin> {
    if values.is_empty() || !(bin_width > 0.0) {
        return Vec::new();
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let n = (max / bin_width).floor() as usize + 1;
    let mut bins: Vec<HistogramBin> = (0..n)
        .map(|k| HistogramBin {
            lower: k as f64 * bin_width,
            upper: (k + 1) as f64 * bin_width,
            count: 0,
        })
        .collect();
    for v in values {
        let k = ((v.max(0.0) / bin_width).floor() as usize).min(n - 1);
        bins[k].count += 1;
    }
    bins
}

/// Loads every `*.csv` below `root` as one clip named by its relative path.
pub fn load_clips(root: &Path) -> Result<Vec<ClipRecord>, IoError> {
    let mut files = Vec::new();
    collect_csv(root, &mut files)?;
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let table = read_labels_csv(&path)?;
            let id = path
                .strip_prefix(root)
                .unwrap_or(&path)
                .display()
                .to_string();
            Ok(ClipRecord::new(id, table.rows))
        })
        .collect()
}

fn collect_csv(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), IoError> {
    if dir.is_file() {
        out.push(dir.to_path_buf());
        return Ok(());
    }
    let entries = std::fs::read_dir(dir).map_err(|e| IoError::file(dir, e))?;
    for entry in entries {
        let path = entry?.path();
        if path.is_dir() {
            collect_csv(&path, out)?;
        } else if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        {
            out.push(path);
        }
    }
    Ok(())
}
