//! Parameter extraction by damped Gauss–Newton least squares.
//!
//! Two models are fitted: the saturation of the resonant transmittance with
//! probe power, and the normalized on/off ratios versus control Rabi
//! frequency. Weighted residuals are `w_i·(model(x_i) − y_i)`.

mod dataset;
mod lm;
mod models;

pub use dataset::SweepDataset;
pub use lm::{levenberg_marquardt, LeastSquares, LmOptions, LmOutcome, Termination};
pub use models::{model_gradient, model_value, residuals, ModelId};

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::spd_inverse;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSpec {
    Free(f64),
    Fixed(f64),
}

impl ParamSpec {
    pub fn value(self) -> f64 {
        match self {
            ParamSpec::Free(v) | ParamSpec::Fixed(v) => v,
        }
    }

    pub fn is_free(self) -> bool {
        matches!(self, ParamSpec::Free(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parameterization {
    /// Free parameters are optimized as `ln p`, keeping rates positive.
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub parameterization: Parameterization,
    pub lm: LmOptions,
}

/// Initial guesses for the power-sweep model. The overall rate scale is not
/// identifiable from a resonant power sweep alone (`Γ₁₀`, `Γ_φ` and `k`
/// scaled together leave `T(P)` unchanged), so at least one of the three
/// must be fixed, typically the power calibration `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSweepInit {
    pub gamma10: ParamSpec,
    pub gamma_phi: ParamSpec,
    pub k: ParamSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffInit {
    pub gamma20: ParamSpec,
    pub r_background: ParamSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitParameter {
    pub name: &'static str,
    pub value: f64,
    /// 1σ from the curvature at the optimum, scaled by the reduced χ².
    pub uncertainty: f64,
    pub free: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: ModelId,
    pub parameters: Vec<FitParameter>,
    pub residual_norm: f64,
    pub initial_residual_norm: f64,
    pub gradient_norm: f64,
    pub initial_gradient_norm: f64,
    pub last_step_norm: f64,
    pub converged: bool,
    pub termination: Termination,
    pub iterations: usize,
    pub points: usize,
}

impl FitReport {
    pub fn get(&self, name: &str) -> Option<&FitParameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn value(&self, name: &str) -> f64 {
        self.get(name).map(|p| p.value).unwrap_or(f64::NAN)
    }
}

/// Fits `(Γ₁₀, Γ_φ, k)` to a transmittance-versus-power sweep (x in W).
pub fn fit_power_sweep(data: &SweepDataset, init: &PowerSweepInit, opts: &FitOptions) -> Result<FitReport> {
    let specs = [init.gamma10, init.gamma_phi, init.k];
    fit_model(ModelId::Eq1Power, &[data], &[ModelId::Eq1Power], &specs, opts)
}

/// Fits `(γ₂₀, R_b)` to an `R_on_off`-versus-control-Rabi curve with
/// `(Γ₁₀, γ₁₀)` held fixed. An optional `T_on_off/T₀` curve measured at the
/// same time is fitted jointly.
pub fn fit_onoff_curve(
    reflection: &SweepDataset,
    transmission: Option<&SweepDataset>,
    fixed: (f64, f64),
    init: &OnOffInit,
    opts: &FitOptions,
) -> Result<FitReport> {
    let specs = [init.gamma20, init.r_background, ParamSpec::Fixed(fixed.0), ParamSpec::Fixed(fixed.1)];
    match transmission {
        Some(t) => fit_model(ModelId::Eq4OnOff, &[reflection, t], &[ModelId::Eq4OnOff, ModelId::Eq4Transmission], &specs, opts),
        None => fit_model(ModelId::Eq4OnOff, &[reflection], &[ModelId::Eq4OnOff], &specs, opts),
    }
}

struct Problem<'a> {
    sets: &'a [&'a SweepDataset],
    models: &'a [ModelId],
    base: Vec<f64>,
    free: Vec<usize>,
    log: bool,
    rows: usize,
}

impl Problem<'_> {
    fn full(&self, theta: &[f64]) -> Vec<f64> {
        let mut p = self.base.clone();
        for (&i, &t) in self.free.iter().zip(theta) {
            p[i] = if self.log { Float::exp(t) } else { t };
        }
        p
    }
}

impl LeastSquares for Problem<'_> {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.free.len()
    }

    fn residuals(&self, theta: &[f64], out: &mut [f64]) {
        let p = self.full(theta);
        let mut row = 0;
        for (set, &model) in self.sets.iter().zip(self.models) {
            for i in 0..set.len() {
                out[row] = set.weight[i] * (model_value(model, &p, set.x[i]) - set.y[i]);
                row += 1;
            }
        }
    }

    fn jacobian(&self, theta: &[f64], out: &mut [f64]) {
        let p = self.full(theta);
        let n = self.free.len();
        let mut grad = vec![0.0; p.len()];
        let mut row = 0;
        for (set, &model) in self.sets.iter().zip(self.models) {
            for i in 0..set.len() {
                model_gradient(model, &p, set.x[i], &mut grad);
                for (c, &j) in self.free.iter().enumerate() {
                    let chain = if self.log { p[j] } else { 1.0 };
                    out[row * n + c] = set.weight[i] * grad[j] * chain;
                }
                row += 1;
            }
        }
    }
}

fn normal_matrix(j: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut a = vec![0.0; cols * cols];
    for r in 0..rows {
        for i in 0..cols {
            for k in 0..cols {
                a[i * cols + k] += j[r * cols + i] * j[r * cols + k];
            }
        }
    }
    a
}

const SINGULAR_TOL: f64 = 1e-10;

fn fit_model(
    report_model: ModelId,
    sets: &[&SweepDataset],
    models: &[ModelId],
    specs: &[ParamSpec],
    opts: &FitOptions,
) -> Result<FitReport> {
    for set in sets {
        let (lo, hi) = set.y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        if hi - lo <= 1e-12 * Float::max(1.0, Float::max(Float::abs(lo), Float::abs(hi))) {
            return Err(Error::DegenerateFit("observable does not vary across the sweep"));
        }
    }
    let log = opts.parameterization == Parameterization::Log;
    let base: Vec<f64> = specs.iter().map(|s| s.value()).collect();
    let free: Vec<usize> = specs.iter().enumerate().filter(|(_, s)| s.is_free()).map(|(i, _)| i).collect();
    if free.is_empty() {
        return Err(Error::DegenerateFit("no free parameters"));
    }
    if log && free.iter().any(|&i| !(base[i] > 0.0)) {
        return Err(Error::InvalidParameter { name: "init", reason: "log-parameterized guesses must be positive" });
    }
    let rows: usize = sets.iter().map(|s| s.len()).sum();
    if rows <= free.len() {
        return Err(Error::DegenerateFit("fewer data points than free parameters"));
    }
    let problem = Problem { sets, models, base, free, log, rows };
    let theta0: Vec<f64> = problem.free.iter().map(|&i| if log { Float::ln(problem.base[i]) } else { problem.base[i] }).collect();

    let n = problem.cols();
    let mut jac = vec![0.0; rows * n];
    problem.jacobian(&theta0, &mut jac);
    if spd_inverse(&normal_matrix(&jac, rows, n), n, SINGULAR_TOL).is_none() {
        return Err(Error::DegenerateFit("singular normal equations at the initial guess"));
    }

    let out = levenberg_marquardt(&problem, &theta0, &opts.lm)?;

    problem.jacobian(&out.theta, &mut jac);
    let cov = spd_inverse(&normal_matrix(&jac, rows, n), n, SINGULAR_TOL)
        .ok_or(Error::DegenerateFit("singular normal equations at the optimum"))?;
    let dof = (rows - n) as f64;
    let scale = out.final_norm * out.final_norm / dof;
    let p = problem.full(&out.theta);
    let names = report_model.parameter_names();
    let parameters = names
        .iter()
        .enumerate()
        .map(|(i, &name)| {
            let pos = problem.free.iter().position(|&f| f == i);
            let uncertainty = match pos {
                Some(c) => {
                    let sd = Float::sqrt(Float::max(cov[c * n + c] * scale, 0.0));
                    if log { p[i] * sd } else { sd }
                }
                None => 0.0,
            };
            FitParameter { name, value: p[i], uncertainty, free: pos.is_some() }
        })
        .collect();
    Ok(FitReport {
        model: report_model,
        parameters,
        residual_norm: out.final_norm,
        initial_residual_norm: out.initial_norm,
        gradient_norm: out.gradient_norm,
        initial_gradient_norm: out.initial_gradient_norm,
        last_step_norm: out.last_step_norm,
        converged: out.converged,
        termination: out.termination,
        iterations: out.iterations,
        points: rows,
    })
}
