//! Device parameters, the transmon spectrum and the drive-power calibration.

use core::f64::consts::{PI, SQRT_2, TAU};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::router::PulseEnvelope;
use crate::units::{ELEMENTARY_CHARGE, HBAR, PLANCK};

/// How incident power maps onto the probe Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// Capacitive circuit model with the ratio `C_c / C_Σ`.
    Circuit { cc_over_csigma: f64 },
    /// Direct calibration `Ω_p/2π = k·√P`, `k` in MHz/√W.
    Direct { k: f64 },
}

impl Coupling {
    /// Direct calibration implied by purely radiative coupling to a 1D line
    /// driven from one side, `Ω² = 2Γ₁₀P/(ħω)`.
    pub fn radiative(gamma10_mhz: f64, probe_ghz: f64) -> Self {
        let gamma_hz = gamma10_mhz * 1e6;
        let f_hz = probe_ghz * 1e9;
        let k_hz = Float::sqrt(2.0 * gamma_hz / (HBAR * f_hz)) / TAU;
        Coupling::Direct { k: k_hz * 1e-6 }
    }
}

/// Transition addressed by a drive tone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    ZeroOne,
    OneTwo,
}

impl Transition {
    pub fn other(self) -> Self {
        match self {
            Transition::ZeroOne => Transition::OneTwo,
            Transition::OneTwo => Transition::ZeroOne,
        }
    }

    /// Dipole matrix element relative to the 0-1 transition.
    pub fn dipole_ratio(self) -> f64 {
        match self {
            Transition::ZeroOne => 1.0,
            Transition::OneTwo => SQRT_2,
        }
    }
}

/// Drive strength: exactly one of incident power or Rabi amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strength {
    /// Incident power in W.
    Power(f64),
    /// Cyclic Rabi frequency in MHz.
    Rabi(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveTone {
    /// Carrier frequency, GHz.
    pub frequency_ghz: f64,
    pub strength: Strength,
    pub envelope: Option<PulseEnvelope>,
    pub target: Transition,
}

impl DriveTone {
    pub fn probe(frequency_ghz: f64, strength: Strength) -> Self {
        Self { frequency_ghz, strength, envelope: None, target: Transition::ZeroOne }
    }

    pub fn control(frequency_ghz: f64, strength: Strength) -> Self {
        Self { frequency_ghz, strength, envelope: None, target: Transition::OneTwo }
    }

    pub fn with_envelope(mut self, envelope: PulseEnvelope) -> Self {
        self.envelope = Some(envelope);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency_ghz.is_finite() && self.frequency_ghz > 0.0) {
            return Err(Error::InvalidParameter { name: "frequency_ghz", reason: "must be positive" });
        }
        match self.strength {
            Strength::Power(p) if !(p >= 0.0 && p.is_finite()) => {
                Err(Error::Domain("drive power must be finite and non-negative"))
            }
            Strength::Rabi(o) if !(o >= 0.0) => Err(Error::Domain("Rabi amplitude must be non-negative")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    /// Maximum Josephson energy E_J,max/h, GHz.
    pub ej_max_ghz: f64,
    /// Charging energy E_c/h, GHz.
    pub ec_ghz: f64,
    /// Reduced flux Φ/Φ₀.
    pub flux: f64,
    /// Radiative relaxation Γ₁₀/2π, MHz.
    pub gamma10_mhz: f64,
    /// Pure dephasing Γ_φ/2π of the 0-1 coherence, MHz.
    pub gamma_phi_mhz: f64,
    /// Decoherence γ₂₀/2π of the 0-2 coherence, MHz.
    pub gamma20_mhz: f64,
    /// Line impedance, Ω.
    pub z0_ohm: f64,
    pub coupling: Option<Coupling>,
    /// Measured anharmonicity α/h in GHz; defaults to E_c when absent.
    pub alpha_override_ghz: Option<f64>,
}

impl DeviceParams {
    /// Values extracted for the measured device: E_J/h = 12.7 GHz,
    /// E_c/h = 590 MHz, Γ₁₀/2π = 73 MHz, Γ_φ/2π = 18 MHz, γ₂₀/2π = 145 MHz
    /// and the measured 720 MHz anharmonicity. The coupling is left unset.
    pub fn measured_device() -> Self {
        Self {
            ej_max_ghz: 12.7,
            ec_ghz: 0.59,
            flux: 0.0,
            gamma10_mhz: 73.0,
            gamma_phi_mhz: 18.0,
            gamma20_mhz: 145.0,
            z0_ohm: 50.0,
            coupling: None,
            alpha_override_ghz: Some(0.72),
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: "must be finite and strictly positive" })
            }
        }
        positive("ej_max_ghz", self.ej_max_ghz)?;
        positive("ec_ghz", self.ec_ghz)?;
        positive("gamma10_mhz", self.gamma10_mhz)?;
        positive("gamma20_mhz", self.gamma20_mhz)?;
        positive("z0_ohm", self.z0_ohm)?;
        if !(self.gamma_phi_mhz.is_finite() && self.gamma_phi_mhz >= 0.0) {
            return Err(Error::InvalidParameter { name: "gamma_phi_mhz", reason: "must be finite and non-negative" });
        }
        if !self.flux.is_finite() {
            return Err(Error::InvalidParameter { name: "flux", reason: "must be finite" });
        }
        if let Some(a) = self.alpha_override_ghz {
            positive("alpha_override_ghz", a)?;
        }
        match self.coupling {
            Some(Coupling::Direct { k }) => positive("coupling_k", k)?,
            Some(Coupling::Circuit { cc_over_csigma }) => positive("cc_over_csigma", cc_over_csigma)?,
            None => {}
        }
        if self.gamma_phi2_mhz() < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma20_mhz",
                reason: "must be at least gamma10 so that the |2> pure dephasing is non-negative",
            });
        }
        Ok(())
    }

    /// γ₁₀ = Γ₁₀/2 + Γ_φ.
    pub fn gamma10_decoherence_mhz(&self) -> f64 {
        self.gamma10_mhz / 2.0 + self.gamma_phi_mhz
    }

    /// Γ₂₁ = 2Γ₁₀ (relaxation scales with the squared dipole).
    pub fn gamma21_mhz(&self) -> f64 {
        2.0 * self.gamma10_mhz
    }

    /// Γ_φ2 = γ₂₀ − Γ₂₁/2.
    pub fn gamma_phi2_mhz(&self) -> f64 {
        self.gamma20_mhz - self.gamma21_mhz() / 2.0
    }

    /// Josephson energy at the current flux, symmetric SQUID.
    pub fn ej_ghz(&self) -> f64 {
        self.ej_max_ghz * Float::abs(Float::cos(PI * self.flux))
    }

    pub fn anharmonicity_ghz(&self) -> f64 {
        self.alpha_override_ghz.unwrap_or(self.ec_ghz)
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = Some(coupling);
        self
    }
}

/// Returns `(ω₀₁/2π, ω₁₂/2π)` in GHz.
pub fn transition_frequencies(params: &DeviceParams) -> Result<(f64, f64)> {
    params.validate()?;
    let ej = params.ej_ghz();
    if ej <= 1e-9 * params.ej_max_ghz {
        return Err(Error::DegenerateSpectrum { ej_ghz: ej });
    }
    let omega01 = Float::sqrt(8.0 * ej * params.ec_ghz) - params.ec_ghz;
    let omega12 = omega01 - params.anharmonicity_ghz();
    if omega01 <= 0.0 || omega12 <= 0.0 {
        return Err(Error::DegenerateSpectrum { ej_ghz: ej });
    }
    Ok((omega01, omega12))
}

/// Cyclic Rabi frequency in MHz produced by `tone`.
///
/// Tones given as a Rabi amplitude are returned unchanged. Tones given as a
/// power go through the calibration; control tones on the 1-2 transition
/// pick up the √2 dipole factor.
pub fn rabi_from_power(params: &DeviceParams, tone: &DriveTone) -> Result<f64> {
    tone.validate()?;
    let power = match tone.strength {
        Strength::Rabi(o) => return Ok(o),
        Strength::Power(p) => p,
    };
    let probe = match params.coupling {
        None => return Err(Error::Configuration("no power calibration: set coupling_k or cc_over_csigma")),
        Some(Coupling::Direct { k }) => k * Float::sqrt(power),
        Some(Coupling::Circuit { cc_over_csigma }) => {
            let ej = params.ej_ghz();
            let omega = 2.0 * ELEMENTARY_CHARGE / HBAR
                * cc_over_csigma
                * Float::powf(ej / (8.0 * params.ec_ghz), 0.25)
                * Float::sqrt(power * params.z0_ohm);
            omega / TAU * 1e-6
        }
    };
    Ok(probe * tone.target.dipole_ratio())
}

/// Average photon number per interaction time, `N = P / (h f_p Γ₁₀/2π)`.
pub fn photon_number(power_w: f64, probe_ghz: f64, gamma10_mhz: f64) -> Result<f64> {
    if !(power_w >= 0.0) {
        return Err(Error::Domain("power must be non-negative"));
    }
    check_rate_inputs(probe_ghz, gamma10_mhz)?;
    Ok(power_w / (PLANCK * probe_ghz * 1e9 * gamma10_mhz * 1e6))
}

/// Inverse of [`photon_number`].
pub fn power_for_n(n: f64, probe_ghz: f64, gamma10_mhz: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(Error::Domain("photon number must be non-negative"));
    }
    check_rate_inputs(probe_ghz, gamma10_mhz)?;
    Ok(n * PLANCK * probe_ghz * 1e9 * gamma10_mhz * 1e6)
}

fn check_rate_inputs(probe_ghz: f64, gamma10_mhz: f64) -> Result<()> {
    if !(probe_ghz > 0.0 && gamma10_mhz > 0.0) {
        return Err(Error::Domain("probe frequency and gamma10 must be positive"));
    }
    Ok(())
}
