use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use super::dataset::SweepDataset;
use crate::error::{Error, Result};

/// Model functions available to the fitter.
///
/// Parameter vectors:
/// - `Eq1Power`: `[Γ₁₀, Γ_φ, k]`, x = power in W, y = resonant `T`.
/// - `Eq4OnOff`: `[γ₂₀, R_b, Γ₁₀, γ₁₀]`, x = control Rabi MHz, y = `R_on_off`.
/// - `Eq4Transmission`: same parameters, y = `T_on_off/T₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    Eq1Power,
    Eq4OnOff,
    Eq4Transmission,
}

impl ModelId {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Eq1Power => "eq1_power",
            ModelId::Eq4OnOff => "eq4_onoff",
            ModelId::Eq4Transmission => "eq4_transmission",
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ModelId::Eq1Power => &["gamma10_mhz", "gamma_phi_mhz", "coupling_k"],
            ModelId::Eq4OnOff | ModelId::Eq4Transmission => {
                &["gamma20_mhz", "r_background", "gamma10_mhz", "gamma10_decoherence_mhz"]
            }
        }
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq1_power" => Ok(ModelId::Eq1Power),
            "eq4_onoff" => Ok(ModelId::Eq4OnOff),
            "eq4_transmission" => Ok(ModelId::Eq4Transmission),
            _ => Err(Error::UnknownModel),
        }
    }
}

pub fn model_value(model: ModelId, p: &[f64], x: f64) -> f64 {
    match model {
        ModelId::Eq1Power => {
            let (g, gp, k) = (p[0], p[1], p[2]);
            let deco = g / 2.0 + gp;
            let r0 = g / (2.0 * deco);
            let s = k * k * x / (g * deco);
            let t = 1.0 - r0 / (1.0 + s);
            t * t
        }
        ModelId::Eq4OnOff => {
            let (g20, rb, g, deco) = (p[0], p[1], p[2], p[3]);
            let r = g / (2.0 * deco + x * x / (2.0 * g20));
            let r0 = g / (2.0 * deco);
            (r * r + rb) / (r0 * r0 + rb)
        }
        ModelId::Eq4Transmission => {
            let (g20, g, deco) = (p[0], p[2], p[3]);
            let t = 1.0 - g / (2.0 * deco + x * x / (2.0 * g20));
            t * t
        }
    }
}

/// Analytic partial derivatives with respect to every model parameter.
pub fn model_gradient(model: ModelId, p: &[f64], x: f64, grad: &mut [f64]) {
    match model {
        ModelId::Eq1Power => {
            let (g, gp, k) = (p[0], p[1], p[2]);
            let deco = g / 2.0 + gp;
            let r0 = g / (2.0 * deco);
            let s = k * k * x / (g * deco);
            let t = 1.0 - r0 / (1.0 + s);
            let dr0 = [gp / (2.0 * deco * deco), -g / (2.0 * deco * deco), 0.0];
            let ds = [-s * (1.0 / g + 0.5 / deco), -s / deco, if k != 0.0 { 2.0 * s / k } else { 0.0 }];
            for i in 0..3 {
                let dt = -dr0[i] / (1.0 + s) + r0 * ds[i] / ((1.0 + s) * (1.0 + s));
                grad[i] = 2.0 * t * dt;
            }
        }
        ModelId::Eq4OnOff => {
            let (g20, rb, g, deco) = (p[0], p[1], p[2], p[3]);
            let d = 2.0 * deco + x * x / (2.0 * g20);
            let r = g / d;
            let r0 = g / (2.0 * deco);
            let (big_r, big_r0) = (r * r, r0 * r0);
            let den = big_r0 + rb;
            // ∂R/∂(γ₂₀, Γ₁₀, γ₁₀)
            let dr_dd = -g / (d * d);
            let d_g20 = -x * x / (2.0 * g20 * g20);
            let dbig_r = [2.0 * r * dr_dd * d_g20, 2.0 * r / d, 2.0 * r * dr_dd * 2.0];
            let dbig_r0 = [0.0, 2.0 * r0 / (2.0 * deco), -2.0 * r0 * g / (2.0 * deco * deco)];
            let num = big_r + rb;
            grad[0] = dbig_r[0] / den;
            grad[1] = (big_r0 - big_r) / (den * den);
            grad[2] = dbig_r[1] / den - num * dbig_r0[1] / (den * den);
            grad[3] = dbig_r[2] / den - num * dbig_r0[2] / (den * den);
        }
        ModelId::Eq4Transmission => {
            let (g20, g, deco) = (p[0], p[2], p[3]);
            let d = 2.0 * deco + x * x / (2.0 * g20);
            let t = 1.0 - g / d;
            let dt_dd = g / (d * d);
            grad[0] = 2.0 * t * dt_dd * (-x * x / (2.0 * g20 * g20));
            grad[1] = 0.0;
            grad[2] = 2.0 * t * (-1.0 / d);
            grad[3] = 2.0 * t * dt_dd * 2.0;
        }
    }
}

/// Weighted residuals `w_i·(model(x_i; p) − y_i)`.
pub fn residuals(model: ModelId, params: &[f64], data: &SweepDataset) -> Result<Vec<f64>> {
    if params.len() != model.parameter_names().len() {
        return Err(Error::InvalidParameter { name: "params", reason: "wrong number of model parameters" });
    }
    let mut out = vec![0.0; data.len()];
    for (i, o) in out.iter_mut().enumerate() {
        *o = data.weight[i] * (model_value(model, params, data.x[i]) - data.y[i]);
    }
    Ok(out)
}
