//! Recovers ball position, blur orientation, blur length and confidence from
//! a predicted heatmap.
//!
//! The pipeline is threshold → 8-connected components → per-blob statistics:
//! the center is the heatmap-weighted mean of the blob, the blur axis is the
//! principal axis of the (unweighted) pixel coordinates, the half-length is
//! half the range of the pixel projections on that axis, and the confidence
//! is the mean heatmap value of the blob.

mod components;
mod tracker;

pub use components::{connected_components, pixel_centroid, Mask, Pixel};
pub use tracker::{track_select, TrackPoint, Tracker, TrackerConfig};

use serde::{Deserialize, Serialize};

use crate::geometry::{fold_half_turn, BlurLabel, Point2};
use crate::heatmap::Heatmap;

/// Eigenvalue gap below which the principal axis is considered undefined.
pub const DEGENERATE_EIGEN_GAP: f64 = 1e-9;

/// `mask[p] = hm[p] > delta` (strict).
pub fn threshold_mask(hm: &Heatmap, delta: f64) -> Mask {
    Mask::from_fn(hm.width(), hm.height(), |x, y| hm.get(x, y) > delta)
}

/// Orientation and extent of a pixel set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreakGeometry {
    /// Unit principal axis `B`, with `theta = atan(B_y / B_x)`.
    pub axis: Point2,
    /// Radians in `(-π/2, π/2]`.
    pub theta: f64,
    pub half_length: f64,
    /// Set when the principal axis is undefined (single pixel or isotropic
    /// spread); the axis then defaults to the x-axis.
    pub degenerate: bool,
}

/// Principal axis of the pixel coordinates and half the projection range.
///
/// Ties between eigenvalues go to the x-axis, with the half-length taken from
/// the x-extent.
pub fn principal_geometry(pixels: &[Pixel]) -> StreakGeometry {
    let x_axis = StreakGeometry {
        axis: Point2::new(1.0, 0.0),
        theta: 0.0,
        half_length: 0.0,
        degenerate: true,
    };
    let Some(mean) = pixel_centroid(pixels) else {
        return x_axis;
    };
    if pixels.len() == 1 {
        return x_axis;
    }
    let n = pixels.len() as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in pixels {
        let dx = p.x as f64 - mean.x;
        let dy = p.y as f64 - mean.y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    sxx /= n;
    syy /= n;
    sxy /= n;
    let half_diff = 0.5 * (sxx - syy);
    let radius = half_diff.hypot(sxy);
    if 2.0 * radius < DEGENERATE_EIGEN_GAP {
        let (lo, hi) = pixels
            .iter()
            .fold((usize::MAX, 0), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
        return StreakGeometry {
            half_length: (hi - lo) as f64 / 2.0,
            ..x_axis
        };
    }
    let lambda = 0.5 * (sxx + syy) + radius;
    let raw = if sxx >= syy {
        Point2::new(lambda - syy, sxy)
    } else {
        Point2::new(sxy, lambda - sxx)
    };
    let theta = fold_half_turn(raw.y.atan2(raw.x));
    let axis = Point2::from_angle(theta);
    let (lo, hi) = pixels
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            let s = axis.dot(p.to_point());
            (lo.min(s), hi.max(s))
        });
    StreakGeometry {
        axis,
        theta,
        half_length: 0.5 * (hi - lo),
        degenerate: false,
    }
}

/// Statistics of one connected blob of a heatmap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobStats {
    pub pixels: Vec<Pixel>,
    pub weighted_centroid: Point2,
    pub geometry: StreakGeometry,
    /// Mean heatmap value over the blob.
    pub confidence: f64,
    /// Sum of heatmap values over the blob.
    pub mass: f64,
}

impl BlobStats {
    pub fn theta(&self) -> f64 {
        self.geometry.theta
    }

    pub fn half_length(&self) -> f64 {
        self.geometry.half_length
    }

    pub fn label(&self) -> BlurLabel {
        BlurLabel::new(
            self.weighted_centroid,
            self.geometry.theta,
            self.geometry.half_length,
        )
    }
}

/// Computes [`BlobStats`]; returns `None` for an empty pixel set.
pub fn blob_stats(hm: &Heatmap, pixels: Vec<Pixel>) -> Option<BlobStats> {
    if pixels.is_empty() {
        return None;
    }
    let (mut mass, mut wx, mut wy) = (0.0, 0.0, 0.0);
    for p in &pixels {
        let v = hm.get(p.x, p.y);
        mass += v;
        wx += v * p.x as f64;
        wy += v * p.y as f64;
    }
    let weighted_centroid = if mass > 0.0 {
        Point2::new(wx / mass, wy / mass)
    } else {
        pixel_centroid(&pixels)?
    };
    let geometry = principal_geometry(&pixels);
    let confidence = (mass / pixels.len() as f64).clamp(0.0, 1.0);
    Some(BlobStats {
        pixels,
        weighted_centroid,
        geometry,
        confidence,
        mass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub label: BlurLabel,
    pub confidence: f64,
    pub mass: f64,
    pub area: usize,
    pub degenerate: bool,
}

impl Detection {
    pub fn position(&self) -> Point2 {
        self.label.center
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectParams {
    pub delta: f64,
    pub min_area: usize,
}

impl Default for DetectParams {
    fn default() -> Self {
        Self {
            delta: 0.5,
            min_area: 2,
        }
    }
}

impl DetectParams {
    pub fn with_delta(delta: f64) -> Self {
        Self {
            delta,
            ..Self::default()
        }
    }
}

/// All blobs above `delta` with at least `min_area` pixels, ordered by
/// descending confidence and then by centroid x.
pub fn detect(hm: &Heatmap, params: &DetectParams) -> Vec<Detection> {
    let mask = threshold_mask(hm, params.delta);
    let min_area = params.min_area.max(1);
    let mut detections: Vec<Detection> = connected_components(&mask)
        .into_iter()
        .filter(|c| c.len() >= min_area)
        .filter_map(|c| blob_stats(hm, c))
        .map(|b| Detection {
            label: b.label(),
            confidence: b.confidence,
            mass: b.mass,
            area: b.pixels.len(),
            degenerate: b.geometry.degenerate,
        })
        .collect();
    detections.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then(a.label.center.x.total_cmp(&b.label.center.x))
    });
    detections
}
