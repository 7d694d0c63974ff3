//! Blur-aware ball tracking toolkit.
//!
//! Balls are labeled at the center of their motion-blur streak together with
//! the streak orientation and half-length. The crate covers the full loop
//! around that convention:
//!
//! 1. **geometry** – labels, streak endpoints, front/midpoint conversion.
//! 2. **heatmap** – binary and real-valued ground-truth maps, blur-extended.
//! 3. **extract** – heatmap → blob → position, blur angle, blur length, confidence.
//! 4. **baseline** – classical frame-difference blur estimator.
//! 5. **optim** / **trajectory** – Nelder-Mead and quadratic trajectory fits
//!    with and without blur constraints.
//! 6. **camera** – pinhole projection and focal/pose calibration from table keypoints.
//! 7. **synth** – synthetic rallies, heatmaps and frames used as a test oracle.
//! 8. **eval** – detection metrics, average precision, blur errors, threshold sweeps.
//! 9. **io** / **dataset** – label CSVs, rasters, calibration files, fixture bundles,
//!    dataset statistics.

pub mod baseline;
pub mod camera;
pub mod commands;
pub mod dataset;
pub mod eval;
pub mod extract;
pub mod geometry;
pub mod heatmap;
pub mod io;
pub mod optim;
pub mod synth;
pub mod trajectory;

pub use geometry::{
    blur_endpoints, from_front_label, to_front_label, BlurLabel, BlurSegment, FrameAnnotation,
    Point2,
};
pub use heatmap::{Heatmap, HeatmapParams, RasterSize};
