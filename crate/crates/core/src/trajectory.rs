//! Quadratic image-plane trajectories.
//!
//! Each axis is a second-degree polynomial in time. Besides the plain
//! least-squares fit, observations that carry a blur streak constrain the
//! derivative through `Ṗ(t_k) = l_k (cos θ_k, sin θ_k) / t_exp`, with the
//! exposure `t_exp` estimated jointly by Nelder-Mead.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2;
use crate::optim::{nelder_mead, NelderMeadOptions, OptimError};

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("underdetermined: need at least 3 observations with distinct times")]
    Underdetermined,
    #[error("exposure time must be positive, got {0}")]
    InvalidExposure(f64),
    #[error("ground truth is empty")]
    EmptyGroundTruth,
    #[error("non-finite observation")]
    NonFinite,
    #[error(transparent)]
    Optim(#[from] OptimError),
}

/// `a (t - t0)² + b (t - t0) + c`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn eval(&self, dt: f64) -> f64 {
        (self.a * dt + self.b) * dt + self.c
    }

    pub fn derivative(&self, dt: f64) -> f64 {
        2.0 * self.a * dt + self.b
    }

    /// Same polynomial expanded about an origin shifted by `shift`.
    pub fn shifted(&self, shift: f64) -> Quadratic {
        Quadratic {
            a: self.a,
            b: self.derivative(shift),
            c: self.eval(shift),
        }
    }
}

/// Per-axis quadratics about `origin` (seconds), plus the exposure estimate
/// when the fit used blur.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadTrajectory2D {
    pub origin: f64,
    pub x: Quadratic,
    pub y: Quadratic,
    pub t_exp: Option<f64>,
}

impl QuadTrajectory2D {
    pub fn position(&self, t: f64) -> Point2 {
        let dt = t - self.origin;
        Point2::new(self.x.eval(dt), self.y.eval(dt))
    }

    pub fn velocity(&self, t: f64) -> Point2 {
        let dt = t - self.origin;
        Point2::new(self.x.derivative(dt), self.y.derivative(dt))
    }

    /// Coefficients `(a, b, c)` of each axis expanded about `origin`.
    pub fn coefficients_about(&self, origin: f64) -> (Quadratic, Quadratic) {
        let shift = origin - self.origin;
        (self.x.shifted(shift), self.y.shifted(shift))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlurObservation {
    pub half_length: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Seconds.
    pub t: f64,
    pub position: Point2,
    pub blur: Option<BlurObservation>,
}

impl Observation {
    pub fn new(t: f64, position: Point2) -> Self {
        Self {
            t,
            position,
            blur: None,
        }
    }

    pub fn with_blur(t: f64, position: Point2, half_length: f64, theta: f64) -> Self {
        Self {
            t,
            position,
            blur: Some(BlurObservation { half_length, theta }),
        }
    }
}

/// Image velocity implied by a blur streak, px/s.
pub fn blur_velocity(half_length: f64, theta: f64, t_exp: f64) -> Result<Point2, TrajectoryError> {
    if !(t_exp > 0.0) {
        return Err(TrajectoryError::InvalidExposure(t_exp));
    }
    Ok(Point2::from_angle(theta) * (half_length / t_exp))
}

pub fn predict(trajectory: &QuadTrajectory2D, t: f64) -> Point2 {
    trajectory.position(t)
}

/// Mean Euclidean distance between predictions and `(t, position)` ground truth.
pub fn mae(
    trajectory: &QuadTrajectory2D,
    ground_truth: &[(f64, Point2)],
) -> Result<f64, TrajectoryError> {
    if ground_truth.is_empty() {
        return Err(TrajectoryError::EmptyGroundTruth);
    }
    let total: f64 = ground_truth
        .iter()
        .map(|(t, p)| trajectory.position(*t).distance(*p))
        .sum();
    Ok(total / ground_truth.len() as f64)
}

/// Observations sorted by time, with the normalized time frame used inside fits.
struct Prepared {
    obs: Vec<Observation>,
    origin: f64,
    /// Seconds per internal time unit.
    scale: f64,
}

impl Prepared {
    fn new(observations: &[Observation]) -> Result<Self, TrajectoryError> {
        if observations.len() < 3 {
            return Err(TrajectoryError::Underdetermined);
        }
        if observations
            .iter()
            .any(|o| !o.t.is_finite() || !o.position.is_finite())
        {
            return Err(TrajectoryError::NonFinite);
        }
        let mut obs = observations.to_vec();
        obs.sort_by(|a, b| a.t.total_cmp(&b.t));
        if obs.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(TrajectoryError::Underdetermined);
        }
        let origin = obs[0].t;
        let mut gaps: Vec<f64> = obs.windows(2).map(|w| w[1].t - w[0].t).collect();
        gaps.sort_by(f64::total_cmp);
        let scale = gaps[gaps.len() / 2];
        Ok(Self { obs, origin, scale })
    }

    fn tau(&self, k: usize) -> f64 {
        (self.obs[k].t - self.origin) / self.scale
    }

    /// Converts a quadratic in internal time to seconds about the same origin.
    fn to_seconds(&self, q: Quadratic) -> Quadratic {
        Quadratic {
            a: q.a / (self.scale * self.scale),
            b: q.b / self.scale,
            c: q.c,
        }
    }
}

/// Least squares `[τ², τ, 1] β ≈ y` by Householder QR.
fn least_squares_quadratic(taus: &[f64], values: &[f64]) -> Result<Quadratic, TrajectoryError> {
    let m = taus.len();
    let mut a: Vec<[f64; 3]> = taus.iter().map(|t| [t * t, *t, 1.0]).collect();
    let mut rhs = values.to_vec();
    for col in 0..3 {
        let norm = (col..m).map(|r| a[r][col] * a[r][col]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(TrajectoryError::Underdetermined);
        }
        let alpha = if a[col][col] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (col..m).map(|r| a[r][col]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for j in col..3 {
                let dot: f64 = (col..m).map(|r| v[r - col] * a[r][j]).sum();
                let f = 2.0 * dot / vnorm2;
                for r in col..m {
                    a[r][j] -= f * v[r - col];
                }
            }
            let dot: f64 = (col..m).map(|r| v[r - col] * rhs[r]).sum();
            let f = 2.0 * dot / vnorm2;
            for r in col..m {
                rhs[r] -= f * v[r - col];
            }
        }
    }
    let scale = a[0][0].abs().max(1.0);
    if (0..3).any(|i| a[i][i].abs() <= 1e-12 * scale) {
        return Err(TrajectoryError::Underdetermined);
    }
    let mut beta = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|j| a[i][j] * beta[j]).sum();
        beta[i] = (rhs[i] - s) / a[i][i];
    }
    Ok(Quadratic {
        a: beta[0],
        b: beta[1],
        c: beta[2],
    })
}

fn fit_internal(p: &Prepared) -> Result<(Quadratic, Quadratic), TrajectoryError> {
    let taus: Vec<f64> = (0..p.obs.len()).map(|k| p.tau(k)).collect();
    let xs: Vec<f64> = p.obs.iter().map(|o| o.position.x).collect();
    let ys: Vec<f64> = p.obs.iter().map(|o| o.position.y).collect();
    Ok((
        least_squares_quadratic(&taus, &xs)?,
        least_squares_quadratic(&taus, &ys)?,
    ))
}

/// Per-axis least-squares quadratic; interpolates exactly with 3 observations.
pub fn fit_position(observations: &[Observation]) -> Result<QuadTrajectory2D, TrajectoryError> {
    let p = Prepared::new(observations)?;
    let (qx, qy) = fit_internal(&p)?;
    Ok(QuadTrajectory2D {
        origin: p.origin,
        x: p.to_seconds(qx),
        y: p.to_seconds(qy),
        t_exp: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlurFitOptions {
    /// Weight of the derivative residuals relative to the position residuals.
    pub blur_weight: f64,
    /// Fit both axes with one shared exposure (`true`) or each axis with its own.
    pub joint: bool,
    /// Admissible exposure range, seconds.
    pub exposure_bounds: (f64, f64),
    /// Time unit (seconds) in which the cost is evaluated. `None` uses the
    /// median observation interval, i.e. residual velocities in px per frame.
    pub time_unit: Option<f64>,
    pub optimizer: NelderMeadOptions,
}

impl Default for BlurFitOptions {
    fn default() -> Self {
        Self {
            blur_weight: 0.2,
            joint: true,
            exposure_bounds: (1e-4, 0.05),
            time_unit: None,
            optimizer: NelderMeadOptions {
                max_iterations: 20_000,
                x_tolerance: 1e-10,
                f_tolerance: 1e-14,
                restarts: 6,
                ..NelderMeadOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlurFit {
    pub trajectory: QuadTrajectory2D,
    /// Exposure of the x and y axes; equal for joint fits.
    pub exposure: (f64, f64),
    /// No usable blur: the result is the plain least-squares fit.
    pub fallback: bool,
    /// An exposure estimate ended on one of its bounds.
    pub exposure_at_bound: bool,
    pub cost: f64,
}

/// One axis' residual data in internal time units.
struct AxisData {
    taus: Vec<f64>,
    values: Vec<f64>,
    /// Streak projection `l_k cos θ_k` (or sine) with sign resolved; `None`
    /// when the observation carries no blur.
    streak: Vec<Option<f64>>,
}

impl AxisData {
    /// Mean squared residual. `ratio` converts derivatives per internal time
    /// unit into derivatives per cost time unit.
    fn cost(&self, q: &Quadratic, exposure: f64, weight: f64, ratio: f64) -> f64 {
        let n = self.taus.len() as f64;
        let mut total = 0.0;
        for ((tau, value), streak) in self.taus.iter().zip(&self.values).zip(&self.streak) {
            let r = q.eval(*tau) - value;
            total += r * r;
            if let Some(s) = streak {
                let rv = q.derivative(*tau) * ratio - s / exposure;
                total += weight * rv * rv;
            }
        }
        total / n
    }
}

/// Blur direction of each observation, flipped to agree with the neighbouring
/// displacement.
fn oriented_blur(p: &Prepared) -> Vec<Option<(f64, f64)>> {
    let n = p.obs.len();
    (0..n)
        .map(|k| {
            let blur = p.obs[k].blur?;
            let (prev, next) = (k.saturating_sub(1), (k + 1).min(n - 1));
            let disp = p.obs[next].position - p.obs[prev].position;
            let mut theta = blur.theta;
            if Point2::from_angle(theta).dot(disp) < 0.0 {
                theta += std::f64::consts::PI;
            }
            Some((blur.half_length, theta))
        })
        .collect()
}

/// Fit with position and blur residuals.
pub fn fit_position_blur(
    observations: &[Observation],
    options: &BlurFitOptions,
) -> Result<BlurFit, TrajectoryError> {
    let p = Prepared::new(observations)?;
    let (qx0, qy0) = fit_internal(&p)?;
    let baseline = QuadTrajectory2D {
        origin: p.origin,
        x: p.to_seconds(qx0),
        y: p.to_seconds(qy0),
        t_exp: None,
    };
    let blur = oriented_blur(&p);
    let usable = blur.iter().flatten().any(|(l, _)| *l > 0.0);
    let (lo, hi) = options.exposure_bounds;
    if !(lo > 0.0 && hi >= lo) {
        return Err(TrajectoryError::InvalidExposure(lo));
    }
    if !usable || options.blur_weight == 0.0 {
        return Ok(BlurFit {
            trajectory: baseline,
            exposure: (f64::NAN, f64::NAN),
            fallback: true,
            exposure_at_bound: false,
            cost: 0.0,
        });
    }

    // Internal time unit relative to the normalized observation time.
    let unit = options.time_unit.unwrap_or(p.scale);
    let ratio = unit / p.scale;
    let taus: Vec<f64> = (0..p.obs.len()).map(|k| p.tau(k)).collect();
    let axis = |pick: fn(Point2) -> f64, trig: fn(f64) -> f64| AxisData {
        taus: taus.clone(),
        values: p.obs.iter().map(|o| pick(o.position)).collect(),
        streak: blur.iter().map(|b| b.map(|(l, t)| l * trig(t))).collect(),
    };
    let ax = axis(|q| q.x, f64::cos);
    let ay = axis(|q| q.y, f64::sin);

    // Exposure is carried in cost units; derivatives in `tau` are scaled by
    // `ratio` to reach them.
    let (log_lo, log_hi) = ((lo / unit).ln(), (hi / unit).ln());
    let exposure_of = |u: f64| u.clamp(log_lo, log_hi).exp();
    let weight = options.blur_weight;

    // Initial exposure: median of l_k / finite-difference speed, in cost units.
    let mut ratios: Vec<f64> = Vec::new();
    for k in 0..p.obs.len() {
        if let Some((l, _)) = blur[k] {
            let (a, b) = (k.saturating_sub(1), (k + 1).min(p.obs.len() - 1));
            let dt = (taus[b] - taus[a]) / ratio;
            let speed = p.obs[b].position.distance(p.obs[a].position) / dt;
            if l > 0.0 && speed > 0.0 {
                ratios.push(l / speed);
            }
        }
    }
    ratios.sort_by(f64::total_cmp);
    let init_log = if ratios.is_empty() {
        0.5 * (log_lo + log_hi)
    } else {
        ratios[ratios.len() / 2].ln().clamp(log_lo, log_hi)
    };

    let steps = |q: &Quadratic| [q.a.abs().max(1.0) * 0.1, q.b.abs().max(1.0) * 0.1, 1.0];
    let scaled_cost = |data: &AxisData, q: &Quadratic, e: f64| data.cost(q, e, weight, ratio);

    let unpack = |v: &[f64]| Quadratic {
        a: v[0],
        b: v[1],
        c: v[2],
    };
    let (qx, qy, ex, ey, cost) = if options.joint {
        let mut x0 = vec![qx0.a, qx0.b, qx0.c, qy0.a, qy0.b, qy0.c, init_log];
        let mut step: Vec<f64> = steps(&qx0).into_iter().chain(steps(&qy0)).collect();
        step.push(0.2);
        let mut nm = options.optimizer.clone();
        nm.initial_step = Some(step);
        let f = |v: &[f64]| {
            let e = exposure_of(v[6]);
            scaled_cost(&ax, &unpack(&v[0..3]), e) + scaled_cost(&ay, &unpack(&v[3..6]), e)
        };
        let m = nelder_mead(f, &x0, &nm)?;
        x0.copy_from_slice(&m.x);
        let e = exposure_of(x0[6]);
        (unpack(&x0[0..3]), unpack(&x0[3..6]), e, e, m.f)
    } else {
        let solve =
            |data: &AxisData, q0: &Quadratic| -> Result<(Quadratic, f64, f64), TrajectoryError> {
                let x0 = vec![q0.a, q0.b, q0.c, init_log];
                let mut step = steps(q0).to_vec();
                step.push(0.2);
                let mut nm = options.optimizer.clone();
                nm.initial_step = Some(step);
                let m = nelder_mead(
                    |v| scaled_cost(data, &unpack(&v[0..3]), exposure_of(v[3])),
                    &x0,
                    &nm,
                )?;
                Ok((unpack(&m.x[0..3]), exposure_of(m.x[3]), m.f))
            };
        let (qx, ex, fx) = solve(&ax, &qx0)?;
        let (qy, ey, fy) = solve(&ay, &qy0)?;
        (qx, qy, ex, ey, fx + fy)
    };

    let at_bound = |e: f64| {
        let l = e.ln();
        (l - log_lo).abs() < 1e-6 || (l - log_hi).abs() < 1e-6
    };
    let (ex_s, ey_s) = (ex * unit, ey * unit);
    Ok(BlurFit {
        trajectory: QuadTrajectory2D {
            origin: p.origin,
            x: p.to_seconds(qx),
            y: p.to_seconds(qy),
            t_exp: Some(if options.joint {
                ex_s
            } else {
                0.5 * (ex_s + ey_s)
            }),
        },
        exposure: (ex_s, ey_s),
        fallback: false,
        exposure_at_bound: at_bound(ex) || at_bound(ey),
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_curve(ts: &[f64], x: Quadratic, y: Quadratic) -> Vec<Observation> {
        ts.iter()
            .map(|t| Observation::new(*t, Point2::new(x.eval(*t), y.eval(*t))))
            .collect()
    }

    #[test]
    fn parabola_through_three_points() {
        let obs = vec![
            Observation::new(0.0, Point2::new(0.0, 0.0)),
            Observation::new(1.0, Point2::new(1.0, 1.0)),
            Observation::new(2.0, Point2::new(2.0, 4.0)),
        ];
        let traj = fit_position(&obs).unwrap();
        let (x, y) = traj.coefficients_about(0.0);
        assert!((y.a - 1.0).abs() < 1e-12 && y.b.abs() < 1e-12 && y.c.abs() < 1e-12);
        assert!(x.a.abs() < 1e-12 && (x.b - 1.0).abs() < 1e-12 && x.c.abs() < 1e-12);
        for o in &obs {
            assert!(traj.position(o.t).distance(o.position) <= 1e-9);
        }
    }

    #[test]
    fn three_arbitrary_points_are_interpolated() {
        let obs = vec![
            Observation::new(10.0 / 30.0, Point2::new(512.3, 88.1)),
            Observation::new(11.0 / 30.0, Point2::new(530.9, 70.4)),
            Observation::new(12.0 / 30.0, Point2::new(551.0, 61.7)),
        ];
        let traj = fit_position(&obs).unwrap();
        for o in &obs {
            assert!(traj.position(o.t).distance(o.position) <= 1e-9);
        }
    }

    #[test]
    fn underdetermined_inputs() {
        let two = [
            Observation::new(0.0, Point2::new(0.0, 0.0)),
            Observation::new(1.0, Point2::new(1.0, 0.0)),
        ];
        assert_eq!(fit_position(&two), Err(TrajectoryError::Underdetermined));
        let dup = [
            Observation::new(0.0, Point2::new(0.0, 0.0)),
            Observation::new(1.0, Point2::new(1.0, 0.0)),
            Observation::new(1.0, Point2::new(2.0, 0.0)),
        ];
        assert_eq!(fit_position(&dup), Err(TrajectoryError::Underdetermined));
    }

    /// Solves the 3×3 normal equations of a quadratic least-squares fit by
    /// Cramer's rule.
    fn normal_equations(ts: &[f64], vs: &[f64]) -> [f64; 3] {
        let mut s = [0.0; 5];
        let mut r = [0.0; 3];
        for (t, v) in ts.iter().zip(vs) {
            for (k, sk) in s.iter_mut().enumerate() {
                *sk += t.powi(k as i32);
            }
            for (k, rk) in r.iter_mut().enumerate() {
                *rk += v * t.powi(k as i32);
            }
        }
        // unknowns ordered (c, b, a)
        let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
        let det = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det(m);
        let mut out = [0.0; 3];
        for (col, o) in out.iter_mut().enumerate() {
            let mut mc = m;
            for row in 0..3 {
                mc[row][col] = r[row];
            }
            *o = det(mc) / d;
        }
        [out[2], out[1], out[0]]
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let x = Quadratic {
            a: 1.5,
            b: -4.0,
            c: 20.0,
        };
        let y = Quadratic {
            a: -0.5,
            b: 3.0,
            c: -7.0,
        };
        let ts: Vec<f64> = (0..10).map(|k| k as f64 * 0.7).collect();
        let obs: Vec<_> = ts
            .iter()
            .map(|t| {
                let p = Point2::new(
                    x.eval(*t) + noise.sample(&mut rng),
                    y.eval(*t) + noise.sample(&mut rng),
                );
                Observation::new(*t, p)
            })
            .collect();
        let (fx, fy) = fit_position(&obs).unwrap().coefficients_about(0.0);
        let xs: Vec<f64> = obs.iter().map(|o| o.position.x).collect();
        let ys: Vec<f64> = obs.iter().map(|o| o.position.y).collect();
        for (got, want) in [
            (fx, normal_equations(&ts, &xs)),
            (fy, normal_equations(&ts, &ys)),
        ] {
            for (g, w) in [got.a, got.b, got.c].iter().zip(want) {
                assert!((g - w).abs() <= 1e-9 * w.abs().max(1.0), "{g} vs {w}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn mae_matches_pointwise_mean(
            coeffs in proptest::array::uniform6(-100.0..100.0f64),
            gt in proptest::collection::vec((0.0..2.0f64, -500.0..500.0f64, -500.0..500.0f64), 1..30),
        ) {
            let traj = QuadTrajectory2D {
                origin: 0.0,
                x: Quadratic { a: coeffs[0], b: coeffs[1], c: coeffs[2] },
                y: Quadratic { a: coeffs[3], b: coeffs[4], c: coeffs[5] },
                t_exp: None,
            };
            let points: Vec<_> = gt.iter().map(|(t, x, y)| (*t, Point2::new(*x, *y))).collect();
            let mut sum = 0.0;
            for (t, p) in &points {
                let px = coeffs[0] * t * t + coeffs[1] * t + coeffs[2];
                let py = coeffs[3] * t * t + coeffs[4] * t + coeffs[5];
                sum += ((px - p.x).powi(2) + (py - p.y).powi(2)).sqrt();
            }
            let expected = sum / points.len() as f64;
            let got = mae(&traj, &points).unwrap();
            proptest::prop_assert!((got - expected).abs() <= 1e-9 * expected.max(1.0));
        }
    }

    #[test]
    fn blur_velocity_examples() {
        let v = blur_velocity(10.0, 0.0, 0.01).unwrap();
        assert!((v.x - 1000.0).abs() < 1e-9 && v.y == 0.0);
        assert_eq!(blur_velocity(0.0, 1.3, 0.01).unwrap().norm(), 0.0);
        assert!(blur_velocity(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn mae_examples() {
        let x = Quadratic {
            a: 3.0,
            b: -2.0,
            c: 10.0,
        };
        let y = Quadratic {
            a: -1.0,
            b: 5.0,
            c: 4.0,
        };
        let traj = QuadTrajectory2D {
            origin: 0.0,
            x,
            y,
            t_exp: None,
        };
        let gt: Vec<_> = (0..10)
            .map(|i| (i as f64 * 0.1, traj.position(i as f64 * 0.1)))
            .collect();
        assert_eq!(mae(&traj, &gt).unwrap(), 0.0);
        let shifted: Vec<_> = gt
            .iter()
            .map(|(t, p)| (*t, *p + Point2::new(2.5, 0.0)))
            .collect();
        assert!((mae(&traj, &shifted).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(mae(&traj, &[]), Err(TrajectoryError::EmptyGroundTruth));
    }

    #[test]
    fn time_shift_equivariance() {
        let x = Quadratic {
            a: 900.0,
            b: 450.0,
            c: 300.0,
        };
        let y = Quadratic {
            a: 2500.0,
            b: -600.0,
            c: 200.0,
        };
        let ts = [0.0, 1.0 / 30.0, 2.0 / 30.0, 3.0 / 30.0];
        let mut obs = on_curve(&ts, x, y);
        obs[1].position.x += 1.3;
        obs[2].position.y -= 0.7;
        let a = fit_position(&obs).unwrap();
        let shift = 1234.5;
        let moved: Vec<_> = obs
            .iter()
            .map(|o| Observation {
                t: o.t + shift,
                ..*o
            })
            .collect();
        let b = fit_position(&moved).unwrap();
        for k in 0..20 {
            let t = k as f64 / 30.0;
            assert!(a.position(t).distance(b.position(t + shift)) <= 1e-6);
        }
    }

    #[test]
    fn zero_blur_falls_back_to_position_fit() {
        let obs = vec![
            Observation::with_blur(0.0, Point2::new(10.0, 20.0), 0.0, 0.3),
            Observation::with_blur(0.04, Point2::new(30.0, 25.0), 0.0, 0.3),
            Observation::with_blur(0.08, Point2::new(48.0, 33.0), 0.0, 0.3),
        ];
        let fit = fit_position_blur(&obs, &BlurFitOptions::default()).unwrap();
        assert!(fit.fallback);
        assert_eq!(fit.trajectory, fit_position(&obs).unwrap());

        let with_blur: Vec<_> = obs
            .iter()
            .map(|o| Observation::with_blur(o.t, o.position, 4.0, 0.2))
            .collect();
        let zero_weight = BlurFitOptions {
            blur_weight: 0.0,
            ..Default::default()
        };
        let fit = fit_position_blur(&with_blur, &zero_weight).unwrap();
        assert_eq!(fit.trajectory, fit_position(&with_blur).unwrap());
    }

    #[test]
    fn noiseless_blur_fit_recovers_truth() {
        let x = Quadratic {
            a: 400.0,
            b: 900.0,
            c: 120.0,
        };
        let y = Quadratic {
            a: 1800.0,
            b: -700.0,
            c: 300.0,
        };
        let t_exp = 0.008;
        let ts = [0.0, 1.0 / 30.0, 2.0 / 30.0];
        let obs: Vec<_> = ts
            .iter()
            .map(|t| {
                let v = Point2::new(x.derivative(*t), y.derivative(*t));
                let l = v.norm() * t_exp;
                // streak direction reported mod 180°
                let theta = crate::geometry::fold_half_turn(v.y.atan2(v.x));
                Observation::with_blur(*t, Point2::new(x.eval(*t), y.eval(*t)), l, theta)
            })
            .collect();
        let fit = fit_position_blur(&obs, &BlurFitOptions::default()).unwrap();
        assert!(!fit.fallback);
        let (fx, fy) = fit.trajectory.coefficients_about(0.0);
        for (got, want) in [
            (fx.a, x.a),
            (fx.b, x.b),
            (fx.c, x.c),
            (fy.a, y.a),
            (fy.b, y.b),
            (fy.c, y.c),
        ] {
            assert!((got - want).abs() <= 1e-3 * want.abs(), "{got} vs {want}");
        }
        let e = fit.trajectory.t_exp.unwrap();
        assert!((e - t_exp).abs() <= 0.05 * t_exp, "t_exp {e}");
    }

    #[test]
    fn separate_axes_variant_runs() {
        let x = Quadratic {
            a: 400.0,
            b: 900.0,
            c: 120.0,
        };
        let y = Quadratic {
            a: 1800.0,
            b: -700.0,
            c: 300.0,
        };
        let obs: Vec<_> = [0.0, 1.0 / 30.0, 2.0 / 30.0]
            .iter()
            .map(|t| {
                let v = Point2::new(x.derivative(*t), y.derivative(*t));
                Observation::with_blur(
                    *t,
                    Point2::new(x.eval(*t), y.eval(*t)),
                    v.norm() * 0.01,
                    v.y.atan2(v.x),
                )
            })
            .collect();
        let opts = BlurFitOptions {
            joint: false,
            ..Default::default()
        };
        let fit = fit_position_blur(&obs, &opts).unwrap();
        assert!((fit.exposure.0 - 0.01).abs() < 5e-4);
        assert!((fit.exposure.1 - 0.01).abs() < 5e-4);
    }
}
