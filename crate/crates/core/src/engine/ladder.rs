use crate::device::DeviceParams;
use crate::error::{Error, Result};

/// Drives and rates of the ladder, all cyclic MHz.
///
/// `probe_detuning = ω_p − ω₀₁`, `control_detuning = ω_c − ω₁₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderSystem {
    pub probe_detuning: f64,
    pub control_detuning: f64,
    pub probe_rabi: f64,
    pub control_rabi: f64,
    pub gamma10: f64,
    pub gamma21: f64,
    pub gamma_phi: f64,
    pub gamma_phi2: f64,
}

impl LadderSystem {
    /// Resonant probe and control on a device; `Γ₂₁ = 2Γ₁₀` and
    /// `Γ_φ2 = γ₂₀ − Γ₁₀`.
    pub fn resonant(params: &DeviceParams, probe_rabi: f64, control_rabi: f64) -> Result<Self> {
        Self::detuned(params, 0.0, 0.0, probe_rabi, control_rabi)
    }

    pub fn detuned(
        params: &DeviceParams,
        probe_detuning: f64,
        control_detuning: f64,
        probe_rabi: f64,
        control_rabi: f64,
    ) -> Result<Self> {
        params.validate()?;
        let sys = Self {
            probe_detuning,
            control_detuning,
            probe_rabi,
            control_rabi,
            gamma10: params.gamma10_mhz,
            gamma21: params.gamma21_mhz(),
            gamma_phi: params.gamma_phi_mhz,
            gamma_phi2: params.gamma_phi2_mhz(),
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Two-level limit: no control, `|2⟩` decoupled.
    pub fn two_level(gamma10: f64, gamma_phi: f64, probe_detuning: f64, probe_rabi: f64) -> Self {
        Self {
            probe_detuning,
            control_detuning: 0.0,
            probe_rabi,
            control_rabi: 0.0,
            gamma10,
            gamma21: 2.0 * gamma10,
            gamma_phi,
            gamma_phi2: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("gamma10", self.gamma10),
            ("gamma21", self.gamma21),
            ("gamma_phi", self.gamma_phi),
            ("gamma_phi2", self.gamma_phi2),
        ];
        for (name, v) in rates {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter { name, reason: "ladder rates must be finite and non-negative" });
            }
        }
        let drives = [
            self.probe_detuning,
            self.control_detuning,
            self.probe_rabi,
            self.control_rabi,
        ];
        if drives.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("ladder detunings and Rabi frequencies must be finite"));
        }
        Ok(())
    }

    /// 0-1 coherence decay `γ₁₀ = Γ₁₀/2 + Γ_φ`.
    pub fn gamma10_decoherence(&self) -> f64 {
        self.gamma10 / 2.0 + self.gamma_phi
    }

    /// 0-2 coherence decay `γ₂₀ = Γ₂₁/2 + Γ_φ2`.
    pub fn gamma20_decoherence(&self) -> f64 {
        self.gamma21 / 2.0 + self.gamma_phi2
    }
}
