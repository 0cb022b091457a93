use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::solve_real;

/// A residual vector `r(θ)` with Jacobian, `rows × cols`, row-major.
pub trait LeastSquares {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn residuals(&self, theta: &[f64], out: &mut [f64]);
    fn jacobian(&self, theta: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop once `‖Jᵀr‖` falls below this fraction of its initial value.
    pub gradient_tolerance: f64,
    /// Stop once `‖δθ‖ ≤ tol·(‖θ‖ + tol)`.
    pub step_tolerance: f64,
    pub initial_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iterations: 200, gradient_tolerance: 1e-8, step_tolerance: 1e-10, initial_damping: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Gradient,
    Step,
    ZeroResidual,
    /// Damping saturated without finding a descent step.
    Stalled,
    MaxIterations,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Gradient => "gradient",
            Termination::Step => "step",
            Termination::ZeroResidual => "zero_residual",
            Termination::Stalled => "stalled",
            Termination::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub theta: Vec<f64>,
    pub initial_norm: f64,
    pub final_norm: f64,
    /// Residual norm after every accepted step, starting with the initial one.
    pub accepted_norms: Vec<f64>,
    pub initial_gradient_norm: f64,
    pub gradient_norm: f64,
    pub last_step_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
}

fn norm(v: &[f64]) -> f64 {
    Float::sqrt(v.iter().map(|x| x * x).sum::<f64>())
}

/// Levenberg–Marquardt with Marquardt diagonal scaling. Only steps that
/// reduce the residual norm are accepted.
pub fn levenberg_marquardt<P: LeastSquares>(problem: &P, theta0: &[f64], opts: &LmOptions) -> Result<LmOutcome> {
    let (m, n) = (problem.rows(), problem.cols());
    let mut theta = theta0.to_vec();
    let mut r = vec![0.0; m];
    let mut jac = vec![0.0; m * n];
    problem.residuals(&theta, &mut r);
    let mut cost = norm(&r);
    if !cost.is_finite() {
        return Err(Error::Domain("residuals are not finite at the initial guess"));
    }
    let initial_norm = cost;
    let mut accepted_norms = vec![cost];
    let mut lambda = opts.initial_damping;
    let mut g0 = None;
    let mut grad_norm = f64::NAN;
    let mut last_step = 0.0;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        problem.jacobian(&theta, &mut jac);
        let mut a = vec![0.0; n * n];
        let mut g = vec![0.0; n];
        for row in 0..m {
            let jr = &jac[row * n..(row + 1) * n];
            for i in 0..n {
                g[i] += jr[i] * r[row];
                for k in 0..n {
                    a[i * n + k] += jr[i] * jr[k];
                }
            }
        }
        grad_norm = norm(&g);
        let g_init = *g0.get_or_insert(grad_norm);
        if cost == 0.0 {
            termination = Termination::ZeroResidual;
            break;
        }
        if grad_norm <= opts.gradient_tolerance * g_init {
            termination = Termination::Gradient;
            break;
        }
        iterations += 1;
        let max_diag = (0..n).map(|i| a[i * n + i]).fold(0.0, f64::max);
        let mut accepted = false;
        loop {
            let mut damped = a.clone();
            for i in 0..n {
                damped[i * n + i] += lambda * Float::max(a[i * n + i], 1e-12 * max_diag);
            }
            let mut step: Vec<f64> = g.iter().map(|v| -v).collect();
            if solve_real(&mut damped, &mut step, n, 1e-300).is_ok() {
                let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + s).collect();
                let mut r_trial = vec![0.0; m];
                problem.residuals(&trial, &mut r_trial);
                let c = norm(&r_trial);
                if c.is_finite() && c < cost {
                    last_step = norm(&step);
                    theta = trial;
                    r = r_trial;
                    cost = c;
                    accepted_norms.push(c);
                    lambda = Float::max(lambda / 3.0, 1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 4.0;
            if lambda > 1e16 {
                break;
            }
        }
        if !accepted {
            termination = Termination::Stalled;
            break;
        }
        if last_step <= opts.step_tolerance * (norm(&theta) + opts.step_tolerance) {
            termination = Termination::Step;
            break;
        }
    }
    let converged = termination != Termination::MaxIterations;
    Ok(LmOutcome {
        theta,
        initial_norm,
        final_norm: cost,
        accepted_norms,
        initial_gradient_norm: g0.unwrap_or(grad_norm),
        gradient_norm: grad_norm,
        last_step_norm: last_step,
        iterations,
        converged,
        termination,
    })
}
