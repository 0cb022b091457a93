use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use num_complex::Complex64;
use num_traits::Float;

use super::generator::build_generator;
use super::ladder::LadderSystem;
use super::steady::steady_state;
use crate::error::{Error, Result};
use crate::linalg::ZERO3;
use crate::units::mhz_to_angular;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Correlation samples, a power of two.
    pub points: usize,
    /// Correlation horizon in units of `1/Γ₁₀` (angular).
    pub horizon_over_gamma: f64,
    /// Zero-padding factor applied before the transform, a power of two.
    pub padding: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { points: 1 << 12, horizon_over_gamma: 50.0, padding: 4 }
    }
}

/// Incoherent emission spectrum on a uniform detuning grid (cyclic MHz from
/// the probe carrier), normalized to unit area.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub detuning_mhz: Vec<f64>,
    pub density: Vec<f64>,
}

impl Spectrum {
    pub fn step_mhz(&self) -> f64 {
        self.detuning_mhz[1] - self.detuning_mhz[0]
    }

    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.step_mhz()
    }

    pub fn peak_value(&self) -> f64 {
        self.density.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Local maxima above `min_relative` of the global peak, located by
    /// parabolic interpolation. Returns detunings in MHz, ascending.
    pub fn peaks(&self, min_relative: f64) -> Vec<f64> {
        let top = self.peak_value();
        let d = &self.density;
        let step = self.step_mhz();
        (1..d.len() - 1)
            .filter(|&i| d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] >= min_relative * top)
            .map(|i| {
                let denom = d[i - 1] - 2.0 * d[i] + d[i + 1];
                let shift = if denom != 0.0 { 0.5 * (d[i - 1] - d[i + 1]) / denom } else { 0.0 };
                self.detuning_mhz[i] + shift * step
            })
            .collect()
    }
}

/// Resonance-fluorescence spectrum of the 0-1 transition.
///
/// `g(τ) = ⟨σ₊(τ)σ₋(0)⟩ − |⟨σ₋⟩|²` follows from the quantum regression
/// theorem by propagating `σ₋ρ_ss − ⟨σ₋⟩ρ_ss` under the generator;
/// `S(ν) = (1/π) Re ∫₀^∞ e^{−iντ} g(τ) dτ` is evaluated with a trapezoidal
/// sum and a radix-2 FFT.
pub fn emission_spectrum(sys: &LadderSystem, opts: &SpectrumOptions) -> Result<Spectrum> {
    if !opts.points.is_power_of_two() || opts.points < 16 || !opts.padding.is_power_of_two() {
        return Err(Error::InvalidParameter { name: "points", reason: "sample and padding counts must be powers of two" });
    }
    if !(opts.horizon_over_gamma > 0.0) || !(sys.gamma10 > 0.0) {
        return Err(Error::InvalidParameter { name: "horizon_over_gamma", reason: "horizon and gamma10 must be positive" });
    }
    let gen = build_generator(sys)?;
    let rho = steady_state(&gen)?;
    let mean_lower = rho.get(1, 0);
    let mut x = ZERO3;
    // (σ₋ρ)_{0j} = ρ_{1j}
    for j in 0..3 {
        x[0][j] = rho.get(1, j);
    }
    for i in 0..3 {
        for j in 0..3 {
            x[i][j] -= mean_lower * rho.get(i, j);
        }
    }

    let n = opts.points;
    let tau_max = opts.horizon_over_gamma / mhz_to_angular(sys.gamma10);
    let dt = tau_max / n as f64;
    let propagator = gen.complex_matrix().scale(dt).expm();
    let mut state: Vec<Complex64> = x.iter().flatten().copied().collect();
    let mut g = Vec::with_capacity(n);
    for _ in 0..n {
        // Tr(σ₊ X) = X₀₁
        g.push(state[1]);
        state = propagator.mul_vec(&state);
    }
    let g0 = g[0].norm();
    if g0 <= 1e-300 {
        return Err(Error::Domain("no incoherent emission: the atom is not driven"));
    }
    let tail = g[n - 1].norm() / g0;
    if tail > 1e-6 {
        return Err(Error::HorizonTooShort { ratio: tail });
    }

    let m = n * opts.padding;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[..n].copy_from_slice(&g);
    buf[0] *= 0.5;
    fft(&mut buf);

    // bins k ≥ m/2 are negative detunings
    let dnu = TAU / (m as f64 * dt);
    let half = m / 2;
    let mut detuning_mhz = Vec::with_capacity(m);
    let mut density = Vec::with_capacity(m);
    for idx in 0..m {
        let k = (idx + half) % m;
        let signed = if k >= half { k as f64 - m as f64 } else { k as f64 };
        detuning_mhz.push(signed * dnu / TAU * 1e3);
        density.push(buf[k].re * dt / PI);
    }
    let area = density.iter().sum::<f64>() * (detuning_mhz[1] - detuning_mhz[0]);
    for v in density.iter_mut() {
        *v /= area;
    }
    Ok(Spectrum { detuning_mhz, density })
}

/// In-place iterative radix-2 FFT with the `e^{−2πi nk/N}` sign convention.
pub(crate) fn fft(data: &mut [Complex64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -TAU / len as f64;
        let w_len = Complex64::new(Float::cos(ang), Float::sin(ang));
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = data[start + k];
                let v = data[start + k + len / 2] * w;
                data[start + k] = u + v;
                data[start + k + len / 2] = u - v;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}
