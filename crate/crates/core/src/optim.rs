//! Nelder-Mead downhill simplex.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop when every vertex lies within this distance (per coordinate) of the best.
    pub x_tolerance: f64,
    /// Stop when `f_worst - f_best` drops below this.
    pub f_tolerance: f64,
    /// Per-coordinate initial simplex offsets. Defaults to 5% of `|x0_i|`,
    /// or 2.5e-4 for zero coordinates.
    pub initial_step: Option<Vec<f64>>,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Number of times the search is restarted from a fresh simplex around
    /// the best point after converging.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            x_tolerance: 1e-8,
            f_tolerance: 1e-10,
            initial_step: None,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            restarts: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum OptimError {
    #[error("starting point is empty")]
    EmptyStart,
    #[error("objective is not finite at the starting point")]
    NonFiniteStart,
    #[error("objective returned a non-finite value during the search (best so far f = {})", best.f)]
    NonFinite { best: Minimum },
}

struct Counter<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }
}

/// Minimizes `f` starting from `x0`.
pub fn nelder_mead<F>(f: F, x0: &[f64], options: &NelderMeadOptions) -> Result<Minimum, OptimError>
where
    F: FnMut(&[f64]) -> f64,
{
    if x0.is_empty() {
        return Err(OptimError::EmptyStart);
    }
    let mut counter = Counter { f, evaluations: 0 };
    let mut best = run(&mut counter, x0, options, options.max_iterations)?;
    let mut remaining = options.max_iterations.saturating_sub(best.iterations);
    for _ in 0..options.restarts {
        if remaining == 0 {
            break;
        }
        let next = run(&mut counter, &best.x.clone(), options, remaining)?;
        remaining = remaining.saturating_sub(next.iterations);
        let improved = next.f < best.f;
        let iterations = best.iterations + next.iterations;
        if improved {
            best = Minimum { iterations, ..next };
        } else {
            best.iterations = iterations;
            best.converged = best.converged || next.converged;
            break;
        }
    }
    best.evaluations = counter.evaluations;
    Ok(best)
}

fn run<F: FnMut(&[f64]) -> f64>(
    counter: &mut Counter<F>,
    x0: &[f64],
    o: &NelderMeadOptions,
    max_iterations: usize,
) -> Result<Minimum, OptimError> {
    let n = x0.len();
    let f0 = counter.eval(x0);
    if !f0.is_finite() {
        return Err(OptimError::NonFiniteStart);
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut v = x0.to_vec();
        let step = match &o.initial_step {
            Some(steps) => steps[i],
            None if x0[i] != 0.0 => 0.05 * x0[i],
            None => 2.5e-4,
        };
        v[i] += step;
        let fv = counter.eval(&v);
        simplex.push((v, fv));
    }

    let fail = |simplex: &[(Vec<f64>, f64)], iterations: usize, evaluations: usize| {
        let (x, f) = simplex
            .iter()
            .filter(|(_, f)| f.is_finite())
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .cloned()
            .unwrap_or((x0.to_vec(), f0));
        OptimError::NonFinite {
            best: Minimum {
                x,
                f,
                iterations,
                evaluations,
                converged: false,
            },
        }
    };
    if simplex.iter().any(|(_, f)| !f.is_finite()) {
        return Err(fail(&simplex, 0, counter.evaluations));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        // Stable sort keeps earlier vertices first among equal values.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= o.f_tolerance || diameter <= o.x_tolerance {
            converged = true;
            break;
        }
        if iterations >= max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64, towards: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(towards)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let worst = simplex[n].0.clone();
        let f_worst = simplex[n].1;
        let f_second = simplex[n - 1].1;
        let f_best = simplex[0].1;

        let xr = along(-o.reflection, &worst);
        let fr = counter.eval(&xr);
        if !fr.is_finite() {
            return Err(fail(&simplex, iterations, counter.evaluations));
        }
        if fr < f_best {
            let xe = along(-o.reflection * o.expansion, &worst);
            let fe = counter.eval(&xe);
            if !fe.is_finite() {
                return Err(fail(&simplex, iterations, counter.evaluations));
            }
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc, accept) = if fr < f_worst {
            let xc = along(-o.reflection * o.contraction, &worst);
            let fc = counter.eval(&xc);
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = along(o.contraction, &worst);
            let fc = counter.eval(&xc);
            let ok = fc < f_worst;
            (xc, fc, ok)
        };
        if !fc.is_finite() {
            return Err(fail(&simplex, iterations, counter.evaluations));
        }
        if accept {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = anchor
                .iter()
                .zip(&vertex.0)
                .map(|(a, x)| a + o.shrink * (x - a))
                .collect();
            let fv = counter.eval(&v);
            *vertex = (v, fv);
        }
        if simplex.iter().any(|(_, f)| !f.is_finite()) {
            return Err(fail(&simplex, iterations, counter.evaluations));
        }
    }
    let (x, f) = simplex.swap_remove(0);
    Ok(Minimum {
        x,
        f,
        iterations,
        evaluations: counter.evaluations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn convex_quadratic() {
        let m = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(2),
            &[0.0, 0.0],
            &NelderMeadOptions::default(),
        )
        .unwrap();
        assert!(
            (m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 2.0).abs() < 1e-5,
            "{m:?}"
        );
    }

    #[test]
    fn rosenbrock_from_standard_start() {
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &NelderMeadOptions::default()).unwrap();
        assert!(m.iterations <= 2000);
        assert!(
            (m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] - 1.0).abs() < 1e-3,
            "{m:?}"
        );
    }

    #[test]
    fn constant_objective_returns_start() {
        let m = nelder_mead(|_| 3.0, &[0.5, -2.0, 7.0], &NelderMeadOptions::default()).unwrap();
        assert_eq!(m.x, vec![0.5, -2.0, 7.0]);
        assert_eq!(m.iterations, 0);
        assert!(m.converged);
    }

    #[test]
    fn non_finite_values_are_reported() {
        let err = nelder_mead(
            |x| {
                if x[0] > 0.01 {
                    f64::NAN
                } else {
                    (x[0] - 1.0).powi(2)
                }
            },
            &[0.0],
            &NelderMeadOptions::default(),
        )
        .unwrap_err();
        match err {
            OptimError::NonFinite { best } => assert!(best.f.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            nelder_mead(|_| f64::INFINITY, &[1.0], &NelderMeadOptions::default()),
            Err(OptimError::NonFiniteStart)
        );
        assert_eq!(
            nelder_mead(|_| 0.0, &[], &NelderMeadOptions::default()),
            Err(OptimError::EmptyStart)
        );
    }

    #[test]
    fn iteration_cap_is_respected() {
        let opts = NelderMeadOptions {
            max_iterations: 10,
            ..Default::default()
        };
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &opts).unwrap();
        assert_eq!(m.iterations, 10);
        assert!(!m.converged);
    }
}
