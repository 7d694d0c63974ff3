//! Ideal pinhole camera anchored to the table, and calibration of focal
//! length and pose from annotated table keypoints.
//!
//! World frame: table surface at `Z = 0`, table length along `Y`, width along
//! `X`, origin at the table center. The principal point is fixed at the image
//! center and lens distortion is not modelled.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2;
use crate::optim::{nelder_mead, NelderMeadOptions, OptimError};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const TABLE_LENGTH: f64 = 2.74;
pub const TABLE_WIDTH: f64 = 1.525;

#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    #[error("behind-camera: point has depth {0:.4} m")]
    BehindCamera(f64),
    #[error("underdetermined: need at least 6 correspondences, got {0}")]
    Underdetermined(usize),
    #[error("keypoints are collinear in the image")]
    Degenerate,
    #[error("calibration diverged: {0}")]
    Diverged(String),
    #[error(transparent)]
    Optim(#[from] OptimError),
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

pub(crate) fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

pub(crate) fn transpose(m: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = *v;
        }
    }
    t
}

/// Rotation matrix of an axis-angle vector (Rodrigues).
pub fn rotation_matrix(r: Vec3) -> Mat3 {
    let theta = norm(r);
    let (s, c1) = if theta < 1e-8 {
        // series: sinθ/θ ≈ 1 - θ²/6, (1 - cosθ)/θ² ≈ 1/2 - θ²/24
        (1.0 - theta * theta / 6.0, 0.5 - theta * theta / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    let k = [[0.0, -r[2], r[1]], [r[2], 0.0, -r[0]], [-r[1], r[0], 0.0]];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let k2: f64 = (0..3).map(|l| k[i][l] * k[l][j]).sum();
            m[i][j] = if i == j { 1.0 } else { 0.0 } + s * k[i][j] + c1 * k2;
        }
    }
    m
}

/// Axis-angle vector of a rotation matrix, with `‖r‖ ≤ π`.
pub fn rotation_vector(m: &Mat3) -> Vec3 {
    let trace = m[0][0] + m[1][1] + m[2][2];
    let cos = ((trace - 1.0) / 2.0).clamp(-1.0, 1.0);
    let theta = cos.acos();
    let w = [m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]];
    if theta < 1e-8 {
        return [w[0] / 2.0, w[1] / 2.0, w[2] / 2.0];
    }
    if std::f64::consts::PI - theta > 1e-6 {
        let f = theta / (2.0 * theta.sin());
        return [w[0] * f, w[1] * f, w[2] * f];
    }
    // Near π: axis from the diagonal of (R + I) / 2 = a aᵀ.
    let diag = [m[0][0], m[1][1], m[2][2]];
    let i = (0..3)
        .max_by(|a, b| diag[*a].total_cmp(&diag[*b]))
        .unwrap_or(0);
    let mut axis = [0.0; 3];
    axis[i] = ((diag[i] + 1.0) / 2.0).max(0.0).sqrt();
    for j in 0..3 {
        if j != i {
            axis[j] = (m[i][j] + m[j][i]) / (4.0 * axis[i]);
        }
    }
    let axis = normalize(axis);
    [axis[0] * theta, axis[1] * theta, axis[2] * theta]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    /// Focal length, pixels.
    pub focal: f64,
    /// Axis-angle rotation world → camera.
    pub rotation: Vec3,
    /// Translation world → camera, meters.
    pub translation: Vec3,
    pub principal_point: Point2,
}

impl CameraModel {
    /// Camera with its principal point at the center of a `width × height` image.
    pub fn new(focal: f64, rotation: Vec3, translation: Vec3, width: usize, height: usize) -> Self {
        Self {
            focal,
            rotation,
            translation,
            principal_point: Point2::new(width as f64 / 2.0, height as f64 / 2.0),
        }
    }

    /// Camera at `eye` looking at `target`, image rows pointing towards `-up`.
    pub fn look_at(
        focal: f64,
        eye: Vec3,
        target: Vec3,
        up: Vec3,
        width: usize,
        height: usize,
    ) -> Self {
        let z = normalize([target[0] - eye[0], target[1] - eye[1], target[2] - eye[2]]);
        let x = normalize(cross(z, up));
        let y = cross(z, x);
        let r = [x, y, z];
        let t = mat_vec(&r, eye);
        Self::new(
            focal,
            rotation_vector(&r),
            [-t[0], -t[1], -t[2]],
            width,
            height,
        )
    }

    pub fn rotation_matrix(&self) -> Mat3 {
        rotation_matrix(self.rotation)
    }

    /// World point in camera coordinates.
    pub fn to_camera(&self, world: Vec3) -> Vec3 {
        let p = mat_vec(&self.rotation_matrix(), world);
        [
            p[0] + self.translation[0],
            p[1] + self.translation[1],
            p[2] + self.translation[2],
        ]
    }

    /// Camera center in world coordinates.
    pub fn center(&self) -> Vec3 {
        let rt = transpose(&self.rotation_matrix());
        let c = mat_vec(&rt, self.translation);
        [-c[0], -c[1], -c[2]]
    }

    /// World-space ray `(origin, unit direction)` through a pixel.
    pub fn unproject_ray(&self, pixel: Point2) -> (Vec3, Vec3) {
        let d = [
            (pixel.x - self.principal_point.x) / self.focal,
            (pixel.y - self.principal_point.y) / self.focal,
            1.0,
        ];
        let rt = transpose(&self.rotation_matrix());
        (self.center(), normalize(mat_vec(&rt, d)))
    }
}

/// Pinhole projection `f X_c / Z_c + c_x`, `f Y_c / Z_c + c_y`.
pub fn project(camera: &CameraModel, world: Vec3) -> Result<Point2, CameraError> {
    let pc = camera.to_camera(world);
    if pc[2] <= 0.0 {
        return Err(CameraError::BehindCamera(pc[2]));
    }
    Ok(Point2::new(
        camera.focal * pc[0] / pc[2] + camera.principal_point.x,
        camera.focal * pc[1] / pc[2] + camera.principal_point.y,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint2D3D {
    pub world: Vec3,
    pub image: Point2,
}

/// The six calibration keypoints: four table corners, the midline–backline
/// intersection on the `-Y` end, and the net–side-edge intersection on `+X`.
pub fn table_keypoints() -> [Vec3; 6] {
    let (hx, hy) = (TABLE_WIDTH / 2.0, TABLE_LENGTH / 2.0);
    [
        [-hx, -hy, 0.0],
        [hx, -hy, 0.0],
        [hx, hy, 0.0],
        [-hx, hy, 0.0],
        [0.0, -hy, 0.0],
        [hx, 0.0, 0.0],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub camera: CameraModel,
    /// Root-mean-square reprojection error, pixels.
    pub rms: f64,
}

/// Root-mean-square reprojection error; `None` if a point is behind the camera.
pub fn reprojection_rms(camera: &CameraModel, keypoints: &[Keypoint2D3D]) -> Option<f64> {
    let mut sum = 0.0;
    for kp in keypoints {
        let p = project(camera, kp.world).ok()?;
        let d = p - kp.image;
        sum += d.dot(d);
    }
    Some((sum / keypoints.len().max(1) as f64).sqrt())
}

/// Canonical starting poses: elevated views from behind either end and from
/// either side of the table.
pub fn canonical_poses(width: usize, height: usize) -> Vec<CameraModel> {
    let focal = width as f64;
    let up = [0.0, 0.0, 1.0];
    let target = [0.0, 0.0, 0.0];
    [
        [0.0, -5.0, 2.5],
        [0.0, 5.0, 2.5],
        [5.0, 0.0, 2.5],
        [-5.0, 0.0, 2.5],
    ]
    .into_iter()
    .map(|eye| CameraModel::look_at(focal, eye, target, up, width, height))
    .collect()
}

fn collinear(points: &[Point2]) -> bool {
    let Some(&a) = points.first() else {
        return true;
    };
    let Some(&b) = points
        .iter()
        .max_by(|p, q| p.distance(a).total_cmp(&q.distance(a)))
    else {
        return true;
    };
    let ab = b - a;
    let len = ab.norm();
    if len < 1e-9 {
        return true;
    }
    points
        .iter()
        .all(|p| ((p.x - a.x) * ab.y - (p.y - a.y) * ab.x).abs() / len < 1e-6)
}

/// Minimizes the summed squared reprojection error over focal length,
/// rotation and translation with Nelder-Mead.
///
/// Without `init` the search starts from each of the [`canonical_poses`] and
/// keeps the best result.
pub fn calibrate_pnp(
    keypoints: &[Keypoint2D3D],
    init: Option<&CameraModel>,
    width: usize,
    height: usize,
) -> Result<Calibration, CameraError> {
    if keypoints.len() < 6 {
        return Err(CameraError::Underdetermined(keypoints.len()));
    }
    let image_points: Vec<Point2> = keypoints.iter().map(|k| k.image).collect();
    if collinear(&image_points) {
        return Err(CameraError::Degenerate);
    }
    let starts: Vec<CameraModel> = match init {
        Some(c) => vec![*c],
        None => canonical_poses(width, height),
    };
    let principal_point = Point2::new(width as f64 / 2.0, height as f64 / 2.0);
    let unpack = |v: &[f64]| CameraModel {
        focal: v[0].exp(),
        rotation: [v[1], v[2], v[3]],
        translation: [v[4], v[5], v[6]],
        principal_point,
    };
    let cost = |v: &[f64]| -> f64 {
        let cam = unpack(v);
        let mut sum = 0.0;
        for kp in keypoints {
            let pc = cam.to_camera(kp.world);
            if !(pc[2] > 1e-6) {
                // Penalize points behind the camera, growing with depth deficit.
                return 1e12 * (1.0 + (1e-6 - pc[2]).abs());
            }
            let u = cam.focal * pc[0] / pc[2] + principal_point.x - kp.image.x;
            let w = cam.focal * pc[1] / pc[2] + principal_point.y - kp.image.y;
            sum += u * u + w * w;
        }
        if sum.is_finite() {
            sum
        } else {
            1e300
        }
    };
    let options = NelderMeadOptions {
        max_iterations: 40_000,
        x_tolerance: 1e-12,
        f_tolerance: 1e-16,
        restarts: 10,
        initial_step: Some(vec![0.1, 0.05, 0.05, 0.05, 0.2, 0.2, 0.2]),
        ..NelderMeadOptions::default()
    };
    let mut best: Option<(f64, CameraModel)> = None;
    for start in starts {
        let x0 = vec![
            start.focal.max(1e-3).ln(),
            start.rotation[0],
            start.rotation[1],
            start.rotation[2],
            start.translation[0],
            start.translation[1],
            start.translation[2],
        ];
        let m = nelder_mead(cost, &x0, &options)?;
        if best.as_ref().is_none_or(|(f, _)| m.f < *f) {
            best = Some((m.f, unpack(&m.x)));
        }
    }
    let (_, mut camera) = best.ok_or_else(|| CameraError::Diverged("no start converged".into()))?;
    camera.rotation = rotation_vector(&rotation_matrix(camera.rotation));
    let rms = reprojection_rms(&camera, keypoints)
        .filter(|r| r.is_finite())
        .ok_or_else(|| CameraError::Diverged(format!("keypoints behind camera: {camera:?}")))?;
    Ok(Calibration { camera, rms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Point2, b: Point2, tol: f64) -> bool {
        a.distance(b) <= tol
    }

    #[test]
    fn on_axis_point_hits_center() {
        let cam = CameraModel::new(1000.0, [0.0; 3], [0.0, 0.0, 2.0], 1280, 720);
        let p = project(&cam, [0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p, Point2::new(640.0, 360.0));
        let q = project(&cam, [0.1, 0.0, 0.0]).unwrap();
        assert!(close(q, Point2::new(690.0, 360.0), 1e-9));
    }

    #[test]
    fn behind_camera_is_rejected() {
        let cam = CameraModel::new(1000.0, [0.0; 3], [0.0, 0.0, 2.0], 1280, 720);
        assert!(matches!(
            project(&cam, [0.0, 0.0, -3.0]),
            Err(CameraError::BehindCamera(_))
        ));
    }

    #[test]
    fn rodrigues_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let axis = normalize([
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]);
            let angle = rng.random_range(0.0..3.1);
            let r = [axis[0] * angle, axis[1] * angle, axis[2] * angle];
            let back = rotation_vector(&rotation_matrix(r));
            for i in 0..3 {
                assert!((back[i] - r[i]).abs() < 1e-9, "{r:?} vs {back:?}");
            }
        }
    }

    #[test]
    fn ray_reprojects_to_pixel() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let eye = [
                rng.random_range(-6.0..6.0),
                rng.random_range(-6.0..6.0),
                rng.random_range(1.0..4.0),
            ];
            let cam = CameraModel::look_at(
                rng.random_range(600.0..2000.0),
                eye,
                [0.0, 0.0, 0.0],
                [0.0, 0.0, 1.0],
                1280,
                720,
            );
            let pixel = Point2::new(rng.random_range(0.0..1280.0), rng.random_range(0.0..720.0));
            let (o, d) = cam.unproject_ray(pixel);
            let s = rng.random_range(1.0..10.0);
            let x = [o[0] + s * d[0], o[1] + s * d[1], o[2] + s * d[2]];
            assert!(close(project(&cam, x).unwrap(), pixel, 1e-9));
        }
    }

    #[test]
    fn doubling_focal_doubles_offsets() {
        let cam = CameraModel::look_at(
            900.0,
            [1.0, -5.0, 2.5],
            [0.0; 3],
            [0.0, 0.0, 1.0],
            1280,
            720,
        );
        let cam2 = CameraModel {
            focal: 1800.0,
            ..cam
        };
        for x in table_keypoints() {
            let a = project(&cam, x).unwrap() - cam.principal_point;
            let b = project(&cam2, x).unwrap() - cam.principal_point;
            assert!(close(b, a * 2.0, 1e-9));
        }
    }

    #[test]
    fn rigid_motion_compensated_by_pose() {
        let cam = CameraModel::look_at(
            1100.0,
            [0.5, -4.5, 2.2],
            [0.0; 3],
            [0.0, 0.0, 1.0],
            1280,
            720,
        );
        let motion_r = rotation_matrix([0.1, -0.2, 0.3]);
        let motion_t = [0.3, -0.1, 0.2];
        // world' = M world + t  =>  R' = R Mᵀ, T' = T - R Mᵀ t
        let r = cam.rotation_matrix();
        let mt = transpose(&motion_r);
        let mut r_new = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r_new[i][j] = (0..3).map(|k| r[i][k] * mt[k][j]).sum();
            }
        }
        let shift = mat_vec(&r_new, motion_t);
        let cam_new = CameraModel {
            rotation: rotation_vector(&r_new),
            translation: [
                cam.translation[0] - shift[0],
                cam.translation[1] - shift[1],
                cam.translation[2] - shift[2],
            ],
            ..cam
        };
        for x in table_keypoints() {
            let moved = mat_vec(&motion_r, x);
            let moved = [
                moved[0] + motion_t[0],
                moved[1] + motion_t[1],
                moved[2] + motion_t[2],
            ];
            assert!(close(
                project(&cam, x).unwrap(),
                project(&cam_new, moved).unwrap(),
                1e-9
            ));
        }
    }

    #[test]
    fn table_geometry() {
        let kp = table_keypoints();
        let diag = norm([kp[2][0] - kp[0][0], kp[2][1] - kp[0][1], 0.0]);
        assert!((diag - (1.525f64.powi(2) + 2.74f64.powi(2)).sqrt()).abs() < 1e-12);
        assert_eq!(kp[5][1], 0.0);
        assert!((kp[1][0] - kp[0][0] - 1.525).abs() < 1e-12);
        assert!((kp[3][1] - kp[0][1] - 2.74).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let kps: Vec<_> = table_keypoints()[..5]
            .iter()
            .map(|w| Keypoint2D3D {
                world: *w,
                image: Point2::new(w[0], w[1]),
            })
            .collect();
        assert_eq!(
            calibrate_pnp(&kps, None, 1280, 720),
            Err(CameraError::Underdetermined(5))
        );
    }

    #[test]
    fn noiseless_round_trip() {
        let truth = CameraModel::look_at(
            1400.0,
            [0.8, -6.0, 2.8],
            [0.0, 0.3, 0.0],
            [0.0, 0.0, 1.0],
            1280,
            720,
        );
        let kps: Vec<_> = table_keypoints()
            .iter()
            .map(|w| Keypoint2D3D {
                world: *w,
                image: project(&truth, *w).unwrap(),
            })
            .collect();
        let cal = calibrate_pnp(&kps, None, 1280, 720).unwrap();
        assert!(
            (cal.camera.focal - 1400.0).abs() / 1400.0 < 0.005,
            "{cal:?}"
        );
        assert!(cal.rms < 0.1);
        // idempotence
        let again = calibrate_pnp(&kps, Some(&cal.camera), 1280, 720).unwrap();
        assert!((again.camera.focal - cal.camera.focal).abs() / cal.camera.focal < 1e-3);
    }
}
