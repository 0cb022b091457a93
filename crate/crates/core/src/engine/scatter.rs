use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use super::density::DensityMatrix3;
use super::generator::build_generator;
use super::ladder::LadderSystem;
use super::steady::steady_state;
use crate::device::{rabi_from_power, transition_frequencies, DeviceParams, DriveTone, Transition};
use crate::error::{Error, Result};
use crate::scattering::ScatterResult;

/// Coherent scattering of the 0-1 probe from the atomic state.
///
/// Input–output with `r = −i(Γ₁₀/Ω_p)⟨σ₋⟩`, `⟨σ₋⟩ = ρ₁₀`. The phase `−i` is
/// the one for which a weak resonant two-level probe gives a real, negative
/// `r`.
pub fn scattering_from_state(sys: &LadderSystem, rho: &DensityMatrix3) -> Result<ScatterResult> {
    transition_scattering(Transition::ZeroOne, sys, rho)
}

/// Steady-state probe scattering of a ladder.
pub fn steady_scattering(sys: &LadderSystem) -> Result<ScatterResult> {
    let rho = steady_state(&build_generator(sys)?)?;
    scattering_from_state(sys, &rho)
}

fn transition_scattering(which: Transition, sys: &LadderSystem, rho: &DensityMatrix3) -> Result<ScatterResult> {
    let (rabi, gamma, coherence) = match which {
        Transition::ZeroOne => (sys.probe_rabi, sys.gamma10, rho.get(1, 0)),
        Transition::OneTwo => (sys.control_rabi, sys.gamma21, rho.get(2, 1)),
    };
    if !(rabi > 0.0) {
        return Err(Error::UndefinedScattering);
    }
    let r = Complex64::new(0.0, -1.0) * coherence * (gamma / rabi);
    Ok(ScatterResult::from_reflection(r))
}

/// Probe transmission with a pump held on one transition and a weak probe
/// on the other, both in one doubly rotating frame.
///
/// The probe addresses the transition the pump does not. A probe closer in
/// frequency to the pump's transition than to its own cannot be represented
/// in the single frame and is rejected.
pub fn two_tone_point(params: &DeviceParams, pump: &DriveTone, probe_ghz: f64, probe_rabi: f64) -> Result<ScatterResult> {
    let (w01, w12) = transition_frequencies(params)?;
    let pump_rabi = rabi_from_power(params, pump)?;
    let freq = |t: Transition| match t {
        Transition::ZeroOne => w01,
        Transition::OneTwo => w12,
    };
    let probe_target = pump.target.other();
    let own = Float::abs(probe_ghz - freq(probe_target));
    let foreign = Float::abs(probe_ghz - freq(pump.target));
    if !(own < foreign) || probe_ghz == pump.frequency_ghz {
        return Err(Error::AmbiguousFrame { probe_ghz });
    }
    if !(probe_rabi > 0.0) {
        return Err(Error::UndefinedScattering);
    }
    let pump_detuning = (pump.frequency_ghz - freq(pump.target)) * 1e3;
    let probe_detuning = (probe_ghz - freq(probe_target)) * 1e3;
    let sys = match pump.target {
        Transition::ZeroOne => LadderSystem::detuned(params, pump_detuning, probe_detuning, pump_rabi, probe_rabi)?,
        Transition::OneTwo => LadderSystem::detuned(params, probe_detuning, pump_detuning, probe_rabi, pump_rabi)?,
    };
    let rho = steady_state(&build_generator(&sys)?)?;
    transition_scattering(probe_target, &sys, &rho)
}

/// [`two_tone_point`] over a list of probe frequencies.
pub fn two_tone_map(params: &DeviceParams, pump: &DriveTone, probe_ghz: &[f64], probe_rabi: f64) -> Result<Vec<ScatterResult>> {
    probe_ghz.iter().map(|&f| two_tone_point(params, pump, f, probe_rabi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::Strength;
    use crate::scattering::reflection_two_level;

    #[test]
    fn weak_probe_matches_closed_form() {
        let p = DeviceParams::measured_device();
        let sys = LadderSystem::resonant(&p, 0.1, 0.0).unwrap();
        let s = steady_scattering(&sys).unwrap();
        let a = reflection_two_level(&p, 0.1).unwrap();
        assert!((s.t - a.t).norm() < 1e-9);
        assert!((s.t.re - 0.3303).abs() < 1e-3);
    }

    #[test]
    fn full_reflection_without_dephasing() {
        let p = DeviceParams { gamma_phi_mhz: 0.0, ..DeviceParams::measured_device() };
        let s = steady_scattering(&LadderSystem::resonant(&p, 0.1, 0.0).unwrap()).unwrap();
        assert!((s.r.re + 1.0).abs() < 1e-3);
        assert!(s.r.im.abs() < 1e-9);
    }

    #[test]
    fn far_detuned_is_transparent() {
        let p = DeviceParams::measured_device();
        let s = steady_scattering(&LadderSystem::detuned(&p, 500.0, 0.0, 0.1, 0.0).unwrap()).unwrap();
        let want = (Complex64::new(1.0, 0.0) - 73.0 / (2.0 * Complex64::new(54.5, 500.0))).norm_sqr();
        assert!((s.transmittance() - want).abs() < 1e-6);
        assert!(s.transmittance() > 0.98);
    }

    #[test]
    fn zero_probe_is_undefined() {
        let p = DeviceParams::measured_device();
        let sys = LadderSystem::resonant(&p, 0.0, 0.0).unwrap();
        assert_eq!(steady_scattering(&sys).unwrap_err(), Error::UndefinedScattering);
    }

    #[test]
    fn two_tone_frame_rules() {
        let p = DeviceParams::measured_device();
        let (w01, w12) = transition_frequencies(&p).unwrap();
        let pump = DriveTone::probe(w01, Strength::Rabi(100.0));
        assert!(matches!(two_tone_point(&p, &pump, w01, 0.1), Err(Error::AmbiguousFrame { .. })));
        assert!(matches!(two_tone_point(&p, &pump, w01 - 0.05, 0.1), Err(Error::AmbiguousFrame { .. })));
        assert!(two_tone_point(&p, &pump, w12, 0.1).is_ok());
    }

    #[test]
    fn two_tone_pump_off_no_dip() {
        let p = DeviceParams::measured_device();
        let (w01, w12) = transition_frequencies(&p).unwrap();
        let pump = DriveTone::probe(w01, Strength::Rabi(0.0));
        let s = two_tone_point(&p, &pump, w12, 0.1).unwrap();
        assert!(s.transmittance() > 0.99);
    }
}
