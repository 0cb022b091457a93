//! The master-equation engine against independent closed forms.

use num_complex::Complex64;

use wqed_core::device::{transition_frequencies, DeviceParams, DriveTone, Strength};
use wqed_core::engine::{steady_scattering, two_tone_map, LadderSystem};
use wqed_core::scattering::{eit_transmission, reflection_two_level};

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

#[test]
fn two_level_saturation_matches_closed_form() {
    let p = DeviceParams::measured_device();
    for omega in log_grid(1e-3, 1e2, 31) {
        let engine = steady_scattering(&LadderSystem::resonant(&p, omega, 0.0).unwrap()).unwrap();
        let closed = reflection_two_level(&p, omega).unwrap();
        let err = (engine.t - closed.t).norm();
        let tol = if omega <= 0.1 { 1e-3 } else { 1e-2 };
        assert!(err < tol, "omega {omega}: |dt| = {err}");
    }
}

#[test]
fn two_level_saturation_oracle_from_bloch_equations() {
    // Resonant optical Bloch equations: ⟨σ₋⟩ = i(Ω/2γ)·w with
    // w = −1/(1 + Ω²/(Γγ)), and r = −i(Γ/Ω)⟨σ₋⟩.
    let p = DeviceParams::measured_device();
    let (g, deco) = (73.0, 54.5);
    for omega in [0.01, 1.0, 30.0, 300.0] {
        let w = -1.0 / (1.0 + omega * omega / (g * deco));
        let sigma = Complex64::new(0.0, omega / (2.0 * deco)) * w;
        let r = Complex64::new(0.0, -g / omega) * sigma;
        let engine = steady_scattering(&LadderSystem::resonant(&p, omega, 0.0).unwrap()).unwrap();
        assert!((engine.r - r).norm() < 1e-9, "{} {}", engine.r, r);
    }
}

#[test]
fn eit_sweep_matches_closed_form() {
    let p = DeviceParams::measured_device();
    for i in 0..30 {
        let oc = 600.0 * i as f64 / 29.0;
        let engine = steady_scattering(&LadderSystem::resonant(&p, 0.1, oc).unwrap()).unwrap();
        let closed = eit_transmission(&p, oc).unwrap();
        let err = (engine.t - closed.t).norm();
        assert!(err < 1e-2, "Ωc {oc}: |dt| = {err}");
        if oc >= 10.0 {
            assert!(err < 1e-3, "Ωc {oc}: |dt| = {err}");
        }
    }
}

#[test]
fn autler_townes_doublet_matches_weak_probe_ladder() {
    // Weak-probe ladder susceptibility with a resonant control of Rabi Ω_c:
    // t(Δ) = 1 − (Γ/2)/(γ₁₀ − iΔ + (Ω_c²/4)/(γ₂₀ − iΔ)).
    let p = DeviceParams::measured_device();
    let (w01, w12) = transition_frequencies(&p).unwrap();
    let oc = 300.0;
    let pump = DriveTone::control(w12, Strength::Rabi(oc));
    let detunings: Vec<f64> = (0..=200).map(|i| -300.0 + 3.0 * i as f64).collect();
    let probes: Vec<f64> = detunings.iter().map(|d| w01 + d * 1e-3).collect();
    let map = two_tone_map(&p, &pump, &probes, 0.1).unwrap();
    for (d, s) in detunings.iter().zip(&map) {
        let dz = Complex64::new(0.0, -d);
        let t = 1.0 - 36.5 / (54.5 + dz + oc * oc / 4.0 / (145.0 + dz));
        assert!((s.t - t).norm() < 1e-3, "Δ {d}");
    }
    let t: Vec<f64> = map.iter().map(|s| s.transmittance()).collect();
    let minima: Vec<f64> = (1..t.len() - 1).filter(|&i| t[i] < t[i - 1] && t[i] <= t[i + 1]).map(|i| detunings[i]).collect();
    assert_eq!(minima.len(), 2);
    assert!((minima[0] + minima[1]).abs() < 1e-9);
}

#[test]
fn two_tone_dip_near_omega12_grows_with_pump() {
    let p = DeviceParams::measured_device();
    let (w01, w12) = transition_frequencies(&p).unwrap();
    let depth = |rabi: f64| {
        let pump = DriveTone::probe(w01, Strength::Rabi(rabi));
        let s = two_tone_map(&p, &pump, &[w12], 0.1).unwrap()[0];
        1.0 - s.transmittance()
    };
    let (a, b, c) = (depth(1.0), depth(20.0), depth(60.0));
    assert!(a < b && b < c, "{a} {b} {c}");
}
