//! Ground-truth heatmaps: binary and real-valued, around a point or swept
//! along a blur segment.
//!
//! Pixels are sampled at their integer lattice coordinates. The real-valued
//! maps are calibrated on the realized pixel distances so that the smallest
//! non-zero value on the raster equals `c_min`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BlurSegment, Point2};

#[derive(Debug, Error, PartialEq)]
pub enum HeatmapError {
    #[error("heatmap dimensions must be non-zero, got {width}x{height}")]
    EmptyRaster { width: usize, height: usize },
    #[error("expected {expected} values for the raster, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("value {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("invalid heatmap parameters: {0}")]
    InvalidParams(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RasterSize {
    pub width: usize,
    pub height: usize,
}

impl RasterSize {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x < self.width as f64 && p.y < self.height as f64
    }
}

/// Single-channel raster of ball likelihood, row-major, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Heatmap {
    pub fn zeros(size: RasterSize) -> Result<Self, HeatmapError> {
        if size.is_empty() {
            return Err(HeatmapError::EmptyRaster {
                width: size.width,
                height: size.height,
            });
        }
        Ok(Self {
            width: size.width,
            height: size.height,
            values: vec![0.0; size.len()],
        })
    }

    pub fn from_values(size: RasterSize, values: Vec<f64>) -> Result<Self, HeatmapError> {
        if size.is_empty() {
            return Err(HeatmapError::EmptyRaster {
                width: size.width,
                height: size.height,
            });
        }
        if values.len() != size.len() {
            return Err(HeatmapError::LengthMismatch {
                expected: size.len(),
                actual: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(HeatmapError::OutOfRange { index, value });
        }
        Ok(Self {
            width: size.width,
            height: size.height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn size(&self) -> RasterSize {
        RasterSize::new(self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Sets a pixel, clamping into `[0, 1]`.
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.values[y * self.width + x] = value.clamp(0.0, 1.0);
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Pixel-wise maximum with another map of the same size.
    pub fn max_with(&mut self, other: &Heatmap) {
        assert_eq!(self.size(), other.size(), "heatmap size mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a = a.max(*b);
        }
    }

    /// Number of non-zero pixels.
    pub fn support(&self) -> usize {
        self.values.iter().filter(|v| **v > 0.0).count()
    }
}

/// Disk radius `d` and the minimum non-zero real value `c_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapParams {
    pub radius: f64,
    pub c_min: f64,
}

impl Default for HeatmapParams {
    fn default() -> Self {
        Self {
            radius: 2.5,
            c_min: 0.7,
        }
    }
}

impl HeatmapParams {
    pub fn new(radius: f64, c_min: f64) -> Result<Self, HeatmapError> {
        let params = Self { radius, c_min };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), HeatmapError> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(HeatmapError::InvalidParams("radius must be positive"));
        }
        if !(self.c_min > 0.0 && self.c_min <= 1.0) {
            return Err(HeatmapError::InvalidParams("c_min must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Visits every lattice pixel whose distance to `segment` is at most `radius`.
fn for_each_in_region(
    segment: &BlurSegment,
    radius: f64,
    size: RasterSize,
    mut visit: impl FnMut(usize, usize, f64),
) {
    let min_x = segment.p1.x.min(segment.p2.x) - radius;
    let max_x = segment.p1.x.max(segment.p2.x) + radius;
    let min_y = segment.p1.y.min(segment.p2.y) - radius;
    let max_y = segment.p1.y.max(segment.p2.y) + radius;
    if !(min_x.is_finite() && max_x.is_finite() && min_y.is_finite() && max_y.is_finite()) {
        return;
    }
    if max_x < 0.0 || max_y < 0.0 {
        return;
    }
    let x0 = min_x.ceil().max(0.0) as usize;
    let y0 = min_y.ceil().max(0.0) as usize;
    let x1 = (max_x.floor() as usize).min(size.width.saturating_sub(1));
    let y1 = (max_y.floor() as usize).min(size.height.saturating_sub(1));
    if x0 > x1 || y0 > y1 {
        return;
    }
    for y in y0..=y1 {
        for x in x0..=x1 {
            let dist = segment.distance_to(Point2::new(x as f64, y as f64));
            if dist <= radius {
                visit(x, y, dist);
            }
        }
    }
}

/// 1 within `radius` of `center`, 0 elsewhere.
pub fn binary_disk_map(
    center: Point2,
    params: &HeatmapParams,
    size: RasterSize,
) -> Result<Heatmap, HeatmapError> {
    binary_blur_map(&BlurSegment::point(center), params, size)
}

/// 1 within `radius` of any point of the segment, 0 elsewhere.
pub fn binary_blur_map(
    segment: &BlurSegment,
    params: &HeatmapParams,
    size: RasterSize,
) -> Result<Heatmap, HeatmapError> {
    params.validate()?;
    let mut map = Heatmap::zeros(size)?;
    for_each_in_region(segment, params.radius, size, |x, y, _| {
        map.values[y * size.width + x] = 1.0;
    });
    Ok(map)
}

/// `min(C exp(-‖p - p_GT‖² / d²), 1)` inside the disk, 0 outside.
pub fn real_disk_map(
    center: Point2,
    params: &HeatmapParams,
    size: RasterSize,
) -> Result<Heatmap, HeatmapError> {
    real_blur_map(&BlurSegment::point(center), params, size)
}

/// Real-valued map swept along the segment.
///
/// The maximum over segment points of the clipped Gaussian is the Gaussian of
/// the point-to-segment distance, since the kernel decreases with distance.
/// `C = c_min exp(d_max² / d²)` where `d_max` is the largest realized
/// distance among in-region pixels.
pub fn real_blur_map(
    segment: &BlurSegment,
    params: &HeatmapParams,
    size: RasterSize,
) -> Result<Heatmap, HeatmapError> {
    params.validate()?;
    let mut map = Heatmap::zeros(size)?;
    let mut region = Vec::new();
    for_each_in_region(segment, params.radius, size, |x, y, dist| {
        region.push((y * size.width + x, dist));
    });
    let Some(d_max) = region.iter().map(|&(_, d)| d).reduce(f64::max) else {
        return Ok(map);
    };
    let d2 = params.radius * params.radius;
    let d_max2 = d_max * d_max;
    for (index, dist) in region {
        // C exp(-r²/d²) with C folded in, so the farthest pixel is exactly c_min.
        let value = params.c_min * ((d_max2 - dist * dist) / d2).exp();
        map.values[index] = value.min(1.0);
    }
    Ok(map)
}

/// Calibration constant `C` of a real-valued map, if any pixel is in region.
pub fn calibration_constant(
    segment: &BlurSegment,
    params: &HeatmapParams,
    size: RasterSize,
) -> Option<f64> {
    let mut d_max: Option<f64> = None;
    for_each_in_region(segment, params.radius, size, |_, _, dist| {
        d_max = Some(d_max.map_or(dist, |m| m.max(dist)));
    });
    d_max.map(|m| params.c_min * (m * m / (params.radius * params.radius)).exp())
}
