//! Frame-difference blur estimator for static cameras.
//!
//! Given a detected ball position in frame `n`, a region of interest around it
//! is differenced against a reference frame (`n - 2` by default), thresholded,
//! and the connected component closest to the ROI center is taken as the blur
//! streak. Its geometry is measured exactly like a heatmap blob.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{connected_components, pixel_centroid, principal_geometry, Mask, Pixel};
use crate::geometry::{BlurLabel, Point2};

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("roi-out-of-bounds: center ({x:.2}, {y:.2}) is outside the frame")]
    RoiOutOfBounds { x: f64, y: f64 },
    #[error("frame dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("no-blur-found: frame difference has no component near the ball")]
    NoBlurFound,
    #[error("invalid frame: {0}")]
    InvalidFrame(&'static str),
}

/// Grayscale image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl GrayFrame {
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            values: vec![value.clamp(0.0, 1.0); width * height],
        }
    }

    pub fn from_values(
        width: usize,
        height: usize,
        values: Vec<f64>,
    ) -> Result<Self, BaselineError> {
        if width == 0 || height == 0 {
            return Err(BaselineError::InvalidFrame("empty frame"));
        }
        if values.len() != width * height {
            return Err(BaselineError::InvalidFrame(
                "value count does not match dimensions",
            ));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(BaselineError::InvalidFrame("intensity outside [0, 1]"));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Luminance `0.299 R + 0.587 G + 0.114 B` of an 8-bit RGB buffer.
    pub fn from_rgb8(width: usize, height: usize, rgb: &[u8]) -> Result<Self, BaselineError> {
        if rgb.len() != width * height * 3 {
            return Err(BaselineError::InvalidFrame(
                "rgb buffer does not match dimensions",
            ));
        }
        let values = rgb
            .chunks_exact(3)
            .map(|px| (0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64) / 255.0)
            .collect();
        Self::from_values(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.values[y * self.width + x] = value.clamp(0.0, 1.0);
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x < self.width as f64 && p.y < self.height as f64
    }
}

/// A crop and the frame coordinates of its top-left pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Roi {
    pub frame: GrayFrame,
    pub offset: (usize, usize),
}

impl Roi {
    pub fn to_frame(&self, p: Point2) -> Point2 {
        Point2::new(p.x + self.offset.0 as f64, p.y + self.offset.1 as f64)
    }

    pub fn to_local(&self, p: Point2) -> Point2 {
        Point2::new(p.x - self.offset.0 as f64, p.y - self.offset.1 as f64)
    }
}

/// Square crop of side `2 * half_size` around `center`, clamped to the frame.
pub fn roi_extract(
    frame: &GrayFrame,
    center: Point2,
    half_size: usize,
) -> Result<Roi, BaselineError> {
    if !center.is_finite() || !frame.contains(center) {
        return Err(BaselineError::RoiOutOfBounds {
            x: center.x,
            y: center.y,
        });
    }
    let half = half_size.max(1) as i64;
    let cx = center.x.round() as i64;
    let cy = center.y.round() as i64;
    let x0 = (cx - half).max(0) as usize;
    let y0 = (cy - half).max(0) as usize;
    let x1 = ((cx + half).max(0) as usize).min(frame.width);
    let y1 = ((cy + half).max(0) as usize).min(frame.height);
    let (w, h) = (x1 - x0, y1 - y0);
    let mut values = Vec::with_capacity(w * h);
    for y in y0..y1 {
        values.extend_from_slice(&frame.values[y * frame.width + x0..y * frame.width + x1]);
    }
    Ok(Roi {
        frame: GrayFrame {
            width: w,
            height: h,
            values,
        },
        offset: (x0, y0),
    })
}

/// `|roi_n - roi_ref| > thresh`.
pub fn frame_diff_mask(
    roi_n: &GrayFrame,
    roi_ref: &GrayFrame,
    thresh: f64,
) -> Result<Mask, BaselineError> {
    if roi_n.width != roi_ref.width || roi_n.height != roi_ref.height {
        return Err(BaselineError::DimensionMismatch(
            roi_n.width,
            roi_n.height,
            roi_ref.width,
            roi_ref.height,
        ));
    }
    Ok(Mask::from_fn(roi_n.width, roi_n.height, |x, y| {
        (roi_n.get(x, y) - roi_ref.get(x, y)).abs() > thresh
    }))
}

/// Component whose unweighted centroid is nearest to `center`; near-ties
/// (within 1e-9 px) go to the larger component.
pub fn nearest_component(mask: &Mask, center: Point2) -> Option<Vec<Pixel>> {
    let mut best: Option<(f64, Vec<Pixel>)> = None;
    for component in connected_components(mask) {
        let Some(c) = pixel_centroid(&component) else {
            continue;
        };
        let dist = c.distance(center);
        let better = match &best {
            None => true,
            Some((bd, bc)) => {
                dist < bd - 1e-9 || ((dist - bd).abs() <= 1e-9 && component.len() > bc.len())
            }
        };
        if better {
            best = Some((dist, component));
        }
    }
    best.map(|(_, c)| c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineParams {
    pub roi_half_size: usize,
    pub diff_threshold: f64,
    /// Frames between the current and the reference frame.
    pub reference_offset: u32,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            roi_half_size: 40,
            diff_threshold: 0.1,
            reference_offset: 2,
        }
    }
}

/// Blur label of the ball detected at `center` in `frame`.
///
/// The streak midpoint is the unweighted centroid of the selected component.
pub fn baseline_blur(
    frame: &GrayFrame,
    reference: &GrayFrame,
    center: Point2,
    params: &BaselineParams,
) -> Result<BlurLabel, BaselineError> {
    if frame.width != reference.width || frame.height != reference.height {
        return Err(BaselineError::DimensionMismatch(
            frame.width,
            frame.height,
            reference.width,
            reference.height,
        ));
    }
    let roi_n = roi_extract(frame, center, params.roi_half_size)?;
    let roi_ref = roi_extract(reference, center, params.roi_half_size)?;
    let mask = frame_diff_mask(&roi_n.frame, &roi_ref.frame, params.diff_threshold)?;
    let component =
        nearest_component(&mask, roi_n.to_local(center)).ok_or(BaselineError::NoBlurFound)?;
    let centroid = pixel_centroid(&component).ok_or(BaselineError::NoBlurFound)?;
    let geometry = principal_geometry(&component);
    Ok(BlurLabel::new(
        roi_n.to_frame(centroid),
        geometry.theta,
        geometry.half_length,
    ))
}
