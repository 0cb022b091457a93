//! Seeded recovery studies and residual bootstrap.
//!
//! Every trial draws from its own ChaCha stream keyed by the master seed and
//! the trial index, so results do not depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use wqed_core::fitting::{
    fit_onoff_curve, fit_power_sweep, model_value, FitOptions, FitReport, ModelId, OnOffInit, ParamSpec,
    PowerSweepInit, SweepDataset,
};

use crate::error::Result;

/// Random stream for trial `index` of a study seeded with `master`.
pub fn trial_rng(master: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// `y·(1 + σ·ξ)` with standard normal `ξ`.
pub fn multiplicative_noise(y: &[f64], sigma: f64, rng: &mut ChaCha20Rng) -> Vec<f64> {
    y.iter()
        .map(|v| {
            let xi: f64 = StandardNormal.sample(rng);
            v * (1.0 + sigma * xi)
        })
        .collect()
}

/// A model together with its starting point and fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FitJob {
    pub model: ModelId,
    /// One entry per model parameter, in model order.
    pub specs: Vec<ParamSpec>,
    pub options: FitOptions,
}

impl FitJob {
    pub fn run(&self, data: &SweepDataset, transmission: Option<&SweepDataset>) -> Result<FitReport> {
        let s = &self.specs;
        let report = match self.model {
            ModelId::Eq1Power => {
                fit_power_sweep(data, &PowerSweepInit { gamma10: s[0], gamma_phi: s[1], k: s[2] }, &self.options)?
            }
            ModelId::Eq4OnOff | ModelId::Eq4Transmission => fit_onoff_curve(
                data,
                transmission,
                (s[2].value(), s[3].value()),
                &OnOffInit { gamma20: s[0], r_background: s[1] },
                &self.options,
            )?,
        };
        Ok(report)
    }
}

/// Noise-free curve of `model` at `truth`.
pub fn synthesize(model: ModelId, truth: &[f64], x: &[f64]) -> Vec<f64> {
    x.iter().map(|&xi| model_value(model, truth, xi)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub index: usize,
    /// Estimates in model parameter order; empty when the fit failed.
    pub estimates: Vec<f64>,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryStudy {
    pub x: Vec<f64>,
    pub truth: Vec<f64>,
    pub noise: f64,
    pub trials: usize,
    pub seed: u64,
    /// Also fit the transmission curve jointly (on/off model only).
    pub joint_transmission: bool,
}

impl RecoveryStudy {
    pub fn run(&self, job: &FitJob) -> Vec<Trial> {
        let clean = synthesize(job.model, &self.truth, &self.x);
        let joint = self.joint_transmission && job.model == ModelId::Eq4OnOff;
        let clean_t = if joint { synthesize(ModelId::Eq4Transmission, &self.truth, &self.x) } else { Vec::new() };
        (0..self.trials)
            .into_par_iter()
            .map(|index| {
                let mut rng = trial_rng(self.seed, index as u64);
                let y = multiplicative_noise(&clean, self.noise, &mut rng);
                let outcome = SweepDataset::unweighted(self.x.clone(), y).map_err(Into::into).and_then(|data| {
                    if joint {
                        let ty = multiplicative_noise(&clean_t, self.noise, &mut rng);
                        let t = SweepDataset::unweighted(self.x.clone(), ty)?;
                        job.run(&data, Some(&t))
                    } else {
                        job.run(&data, None)
                    }
                });
                match outcome {
                    Ok(r) => Trial {
                        index,
                        estimates: r.parameters.iter().map(|p| p.value).collect(),
                        converged: r.converged,
                        error: None,
                    },
                    Err(e) => Trial { index, estimates: Vec::new(), converged: false, error: Some(e.to_string()) },
                }
            })
            .collect()
    }
}

/// Median of the finite values, `NaN` if there are none.
pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median over successful trials of parameter `i`.
pub fn median_estimate(trials: &[Trial], i: usize) -> f64 {
    let v: Vec<f64> = trials.iter().filter_map(|t| t.estimates.get(i).copied()).collect();
    median(&v)
}

/// Residual bootstrap: refits `count` datasets built from the fitted curve
/// plus resampled residuals and returns the sample standard deviation of
/// each parameter.
pub fn bootstrap(job: &FitJob, data: &SweepDataset, fit: &FitReport, count: usize, seed: u64) -> Vec<f64> {
    let params: Vec<f64> = fit.parameters.iter().map(|p| p.value).collect();
    let fitted = synthesize(job.model, &params, &data.x);
    let resid: Vec<f64> = fitted.iter().zip(&data.y).map(|(f, y)| y - f).collect();
    let mut refit_job = job.clone();
    for (spec, &v) in refit_job.specs.iter_mut().zip(&params) {
        *spec = if spec.is_free() { ParamSpec::Free(v) } else { ParamSpec::Fixed(v) };
    }
    let samples: Vec<Vec<f64>> = (0..count)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = trial_rng(seed, b as u64);
            let y: Vec<f64> = fitted
                .iter()
                .map(|f| f + resid[rand::Rng::random_range(&mut rng, 0..resid.len())])
                .collect();
            let set = SweepDataset::new(data.x.clone(), y, data.weight.clone()).ok()?;
            let r = refit_job.run(&set, None).ok()?;
            Some(r.parameters.iter().map(|p| p.value).collect())
        })
        .collect();
    (0..params.len())
        .map(|i| {
            let n = samples.len();
            if n < 2 {
                return f64::NAN;
            }
            let mean = samples.iter().map(|s| s[i]).sum::<f64>() / n as f64;
            (samples.iter().map(|s| (s[i] - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        })
        .collect()
}
