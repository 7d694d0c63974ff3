//! Image-plane geometry shared by every other module.
//!
//! Coordinates follow the usual raster convention: `x` grows to the right and
//! `y` grows downwards, so a positive blur angle turns clockwise on screen.
//! Angles are radians everywhere except at the CSV boundary.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

/// A sub-pixel image point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Unit vector at `angle` radians from the x-axis.
    pub fn from_angle(angle: f64) -> Point2 {
        Point2::new(angle.cos(), angle.sin())
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// A ball observation in the midpoint convention: streak center, streak
/// orientation and streak half-length.
///
/// When `half_length` is zero the angle carries no information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlurLabel {
    pub center: Point2,
    /// Radians from the image x-axis (y down).
    pub theta: f64,
    /// Half of the streak extent, pixels.
    pub half_length: f64,
}

impl BlurLabel {
    pub fn new(center: Point2, theta: f64, half_length: f64) -> Self {
        debug_assert!(half_length >= 0.0, "negative blur half-length");
        Self {
            center,
            theta,
            half_length,
        }
    }

    /// A label without blur.
    pub fn sharp(center: Point2) -> Self {
        Self::new(center, 0.0, 0.0)
    }

    pub fn has_blur(&self) -> bool {
        self.half_length > 0.0
    }

    /// Half-streak vector `(l cos θ, l sin θ)`.
    pub fn half_vector(&self) -> Point2 {
        Point2::from_angle(self.theta) * self.half_length
    }

    pub fn endpoints(&self) -> BlurSegment {
        blur_endpoints(self)
    }
}

/// The two extremities of a straight blur streak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlurSegment {
    pub p1: Point2,
    pub p2: Point2,
}

impl BlurSegment {
    pub fn new(p1: Point2, p2: Point2) -> Self {
        Self { p1, p2 }
    }

    /// A zero-length segment at `p`.
    pub fn point(p: Point2) -> Self {
        Self { p1: p, p2: p }
    }

    pub fn midpoint(&self) -> Point2 {
        self.p1.midpoint(self.p2)
    }

    pub fn length(&self) -> f64 {
        self.p1.distance(self.p2)
    }

    /// Euclidean distance from `p` to the closed segment, by clamped projection.
    ///
    /// Endpoints are visited in a fixed order so `(p1, p2)` and `(p2, p1)`
    /// give bit-identical results.
    pub fn distance_to(&self, p: Point2) -> f64 {
        let (a, b) = if (self.p1.x, self.p1.y) <= (self.p2.x, self.p2.y) {
            (self.p1, self.p2)
        } else {
            (self.p2, self.p1)
        };
        let d = b - a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return p.distance(a);
        }
        let t = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
        p.distance(a + d * t)
    }

    /// Label in the midpoint convention. `theta` points from `p2` to `p1`.
    pub fn to_label(&self) -> BlurLabel {
        let d = self.p1 - self.p2;
        let half_length = 0.5 * d.norm();
        let theta = if half_length > 0.0 {
            d.y.atan2(d.x)
        } else {
            0.0
        };
        BlurLabel::new(self.midpoint(), theta, half_length)
    }
}

/// Annotation of one frame of a clip; `label` is `None` when no ball is visible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameAnnotation {
    pub frame_index: u64,
    pub label: Option<BlurLabel>,
}

impl FrameAnnotation {
    pub fn visible(frame_index: u64, label: BlurLabel) -> Self {
        Self {
            frame_index,
            label: Some(label),
        }
    }

    pub fn hidden(frame_index: u64) -> Self {
        Self {
            frame_index,
            label: None,
        }
    }
}

/// `p1 = p_b + (l cos θ, l sin θ)`, `p2 = p_b - (l cos θ, l sin θ)`.
pub fn blur_endpoints(label: &BlurLabel) -> BlurSegment {
    let h = label.half_vector();
    BlurSegment {
        p1: label.center + h,
        p2: label.center - h,
    }
}

/// Leading-edge position of a label.
///
/// A single frame cannot tell which end of the streak is the front; this
/// always returns `p1`, the `+θ` end. Orient `theta` along the motion (for
/// example from neighbouring frames) before converting.
pub fn to_front_label(label: &BlurLabel) -> Point2 {
    blur_endpoints(label).p1
}

/// Inverse of [`to_front_label`]: recovers the streak center from a
/// leading-edge position.
pub fn from_front_label(front: Point2, theta: f64, half_length: f64) -> BlurLabel {
    let center = front - Point2::from_angle(theta) * half_length;
    BlurLabel::new(center, theta, half_length)
}

/// Folds an angle into `(-π/2, π/2]`.
pub fn fold_half_turn(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(PI);
    if a > PI / 2.0 {
        a -= PI;
    }
    a
}

/// Orientation distance treating `θ` and `θ + π` as the same line, in `[0, π/2]`.
pub fn orientation_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}
