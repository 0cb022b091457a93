//! Closed-form resonant scattering off the transmon.
//!
//! All formulas are ratios of rates, so they are evaluated directly in the
//! cyclic MHz units carried by [`DeviceParams`].

use num_complex::Complex64;
use num_traits::Float;

use crate::device::DeviceParams;
use crate::error::{Error, Result};

/// Coherent scattering amplitudes and powers. `t = 1 + r` holds by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterResult {
    pub t: Complex64,
    pub r: Complex64,
}

impl ScatterResult {
    pub fn from_reflection(r: Complex64) -> Self {
        Self { t: r + 1.0, r }
    }

    pub fn from_transmission(t: Complex64) -> Self {
        Self { t, r: t - 1.0 }
    }

    /// Coherent transmittance `|t|²`.
    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// Coherent reflectance `|r|²`.
    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }

    /// Power not accounted for by coherent transmission and reflection.
    pub fn incoherent(&self) -> f64 {
        1.0 - self.transmittance() - self.reflectance()
    }
}

/// Maximum reflection amplitude `r₀ = 1/(1 + 2Γ_φ/Γ₁₀)`.
pub fn max_reflection_amplitude(params: &DeviceParams) -> f64 {
    1.0 / (1.0 + 2.0 * params.gamma_phi_mhz / params.gamma10_mhz)
}

/// Resonant two-level reflection at probe Rabi frequency `probe_rabi_mhz`.
pub fn reflection_two_level(params: &DeviceParams, probe_rabi_mhz: f64) -> Result<ScatterResult> {
    params.validate()?;
    if !(probe_rabi_mhz >= 0.0) {
        return Err(Error::Domain("probe Rabi frequency must be non-negative"));
    }
    let saturation = probe_rabi_mhz * probe_rabi_mhz / (params.gamma10_mhz * params.gamma10_decoherence_mhz());
    let r = -max_reflection_amplitude(params) / (1.0 + saturation);
    Ok(ScatterResult::from_reflection(Complex64::new(r, 0.0)))
}

/// Weak-probe transmission with a resonant control of Rabi frequency
/// `control_rabi_mhz` on the 1-2 transition. Infinite control gives `t = 1`.
pub fn eit_transmission(params: &DeviceParams, control_rabi_mhz: f64) -> Result<ScatterResult> {
    params.validate()?;
    if !(control_rabi_mhz >= 0.0) {
        return Err(Error::Domain("control Rabi frequency must be non-negative"));
    }
    let denom = 2.0 * params.gamma10_decoherence_mhz()
        + control_rabi_mhz * control_rabi_mhz / (2.0 * params.gamma20_mhz);
    let t = 1.0 - params.gamma10_mhz / denom;
    Ok(ScatterResult::from_transmission(Complex64::new(t, 0.0)))
}

/// Normalized on/off ratios `(R_on_off, T_on_off/T₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffRatios {
    pub reflection: f64,
    pub transmission: f64,
}

pub fn on_off_ratios(params: &DeviceParams, control_rabi_mhz: f64, r_background: f64) -> Result<OnOffRatios> {
    if !(0.0..1.0).contains(&r_background) {
        return Err(Error::Domain("background reflection must lie in [0, 1)"));
    }
    let on = eit_transmission(params, control_rabi_mhz)?;
    let off = eit_transmission(params, 0.0)?;
    Ok(OnOffRatios {
        reflection: (on.reflectance() + r_background) / (off.reflectance() + r_background),
        transmission: on.transmittance(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxReflectance {
    /// `(Γ₁₀/2γ₁₀)²`.
    pub exact: f64,
    /// `1 − 4Γ_φ/Γ₁₀`.
    pub first_order: f64,
}

pub fn max_reflectance(params: &DeviceParams) -> Result<MaxReflectance> {
    params.validate()?;
    let ratio = params.gamma10_mhz / (2.0 * params.gamma10_decoherence_mhz());
    Ok(MaxReflectance {
        exact: ratio * ratio,
        first_order: 1.0 - 4.0 * params.gamma_phi_mhz / params.gamma10_mhz,
    })
}

/// Control Rabi frequency that brings the EIT transmission amplitude to
/// `target_t`, or `None` if unreachable.
pub fn control_for_transmission(params: &DeviceParams, target_t: f64) -> Option<f64> {
    let t0 = 1.0 - params.gamma10_mhz / (2.0 * params.gamma10_decoherence_mhz());
    if !(target_t >= t0 && target_t < 1.0) {
        return None;
    }
    let denom = params.gamma10_mhz / (1.0 - target_t);
    let omega_sq = 2.0 * params.gamma20_mhz * (denom - 2.0 * params.gamma10_decoherence_mhz());
    Some(Float::sqrt(Float::max(omega_sq, 0.0)))
}
