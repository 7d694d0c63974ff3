//! Fixture bundles: a directory holding the labels, heatmaps and optional
//! frames of one synthetic clip, described by a versioned JSON manifest.
//!
//! ```text
//! bundle/
//!   manifest.json
//!   labels.csv
//!   heatmaps/000000.f32
//!   frames/000000.pgm      (optional)
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::csv::{read_labels_csv, write_labels_csv, LabelTable};
use super::raster::{
    frame_to_image, load_gray_frame, load_heatmap_f32, save_gray_image, save_heatmap_f32,
};
use super::{read_text, write_atomic, IoError};
use crate::baseline::GrayFrame;
use crate::geometry::FrameAnnotation;
use crate::heatmap::Heatmap;
use crate::synth::{ClipConfig, SynthFrameTruth};

pub const BUNDLE_SCHEMA: u32 = 1;
/// Labels in bundles keep enough decimals to reproduce the rendered maps.
pub const BUNDLE_DECIMALS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub frame_index: u64,
    pub t: f64,
    pub heatmap: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub seed: u64,
    pub config: ClipConfig,
    pub labels: String,
    pub frames: Vec<FrameEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub manifest: Manifest,
    pub labels: LabelTable,
    pub heatmaps: Vec<Heatmap>,
    pub frames: Vec<Option<GrayFrame>>,
}

fn mkdir(path: &Path) -> Result<(), IoError> {
    fs::create_dir_all(path).map_err(|e| IoError::file(path, e))
}

/// Writes a bundle; the manifest goes last so a complete manifest implies a
/// complete bundle.
pub fn write_bundle(
    dir: &Path,
    seed: u64,
    config: &ClipConfig,
    frames: &[SynthFrameTruth],
) -> Result<Manifest, IoError> {
    mkdir(&dir.join("heatmaps"))?;
    let mut entries = Vec::with_capacity(frames.len());
    for f in frames {
        let heatmap = format!("heatmaps/{:06}.f32", f.frame_index);
        save_heatmap_f32(&dir.join(&heatmap), &f.heatmap)?;
        let frame = match &f.gray_frame {
            Some(g) => {
                mkdir(&dir.join("frames"))?;
                let name = format!("frames/{:06}.pgm", f.frame_index);
                save_gray_image(&dir.join(&name), &frame_to_image(g))?;
                Some(name)
            }
            None => None,
        };
        entries.push(FrameEntry {
            frame_index: f.frame_index,
            t: f.t,
            heatmap,
            frame,
        });
    }
    let labels = LabelTable::new(
        frames
            .iter()
            .map(|f| FrameAnnotation {
                frame_index: f.frame_index,
                label: f.label,
            })
            .collect(),
    );
    write_labels_csv(&dir.join("labels.csv"), &labels, BUNDLE_DECIMALS)?;
    let manifest = Manifest {
        schema: BUNDLE_SCHEMA,
        seed,
        config: config.clone(),
        labels: "labels.csv".into(),
        frames: entries,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    write_atomic(&dir.join("manifest.json"), json.as_bytes())?;
    Ok(manifest)
}

pub fn read_bundle(dir: &Path) -> Result<Bundle, IoError> {
    let manifest: Manifest = serde_json::from_str(&read_text(&dir.join("manifest.json"))?)?;
    if manifest.schema != BUNDLE_SCHEMA {
        return Err(IoError::Format(format!(
            "unsupported bundle schema {} (expected {BUNDLE_SCHEMA})",
            manifest.schema
        )));
    }
    let labels = read_labels_csv(&dir.join(&manifest.labels))?;
    let heatmaps = manifest
        .frames
        .iter()
        .map(|f| load_heatmap_f32(&dir.join(&f.heatmap)))
        .collect::<Result<Vec<_>, _>>()?;
    let frames = manifest
        .frames
        .iter()
        .map(|f| {
            f.frame
                .as_ref()
                .map(|name| load_gray_frame(&dir.join(name)))
                .transpose()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Bundle {
        manifest,
        labels,
        heatmaps,
        frames,
    })
}
