//! EIT-based routing: one atom switched by a control pulse, and a cascade of
//! atoms separated by circulators that steers the probe to one of several
//! output ports.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, SQRT_2};
use num_traits::Float;

use crate::device::{rabi_from_power, transition_frequencies, DeviceParams, DriveTone, Transition};
use crate::engine::{
    build_generator, evolve, scattering_from_state, steady_state, DrivenLiouvillian, EvolveOptions, LadderSystem,
};
use crate::error::{Error, Result};
use crate::scattering::{eit_transmission, reflection_two_level, ScatterResult};

/// Time envelope of a control tone, amplitude as cyclic Rabi MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseEnvelope {
    Square { amplitude: f64, start_ns: f64, duration_ns: f64 },
    Gaussian { amplitude: f64, center_ns: f64, fwhm_ns: f64 },
}

impl PulseEnvelope {
    pub fn validate(&self) -> Result<()> {
        let (amp, width) = match *self {
            PulseEnvelope::Square { amplitude, duration_ns, .. } => (amplitude, duration_ns),
            PulseEnvelope::Gaussian { amplitude, fwhm_ns, .. } => (amplitude, fwhm_ns),
        };
        if !(amp >= 0.0 && amp.is_finite()) {
            return Err(Error::InvalidParameter { name: "amplitude", reason: "must be finite and non-negative" });
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter { name: "width", reason: "pulse duration/fwhm must be positive" });
        }
        Ok(())
    }

    pub fn value(&self, t_ns: f64) -> f64 {
        match *self {
            PulseEnvelope::Square { amplitude, start_ns, duration_ns } => {
                if t_ns >= start_ns && t_ns < start_ns + duration_ns {
                    amplitude
                } else {
                    0.0
                }
            }
            PulseEnvelope::Gaussian { amplitude, center_ns, fwhm_ns } => {
                let x = (t_ns - center_ns) / fwhm_ns;
                amplitude * Float::exp(-4.0 * LN_2 * x * x)
            }
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            PulseEnvelope::Square { amplitude, .. } | PulseEnvelope::Gaussian { amplitude, .. } => amplitude,
        }
    }

    /// Interval over which the envelope is at least half its peak.
    pub fn half_max_window(&self) -> (f64, f64) {
        match *self {
            PulseEnvelope::Square { start_ns, duration_ns, .. } => (start_ns, start_ns + duration_ns),
            PulseEnvelope::Gaussian { center_ns, fwhm_ns, .. } => (center_ns - fwhm_ns / 2.0, center_ns + fwhm_ns / 2.0),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            PulseEnvelope::Square { start_ns, duration_ns, .. } => vec![start_ns, start_ns + duration_ns],
            PulseEnvelope::Gaussian { .. } => Vec::new(),
        }
    }
}

/// Control amplitude for a control tone 30 dB above the probe on the same
/// line: `Ω_c = √2·√(10³)·Ω_p`.
pub fn default_control_rabi(probe_rabi_mhz: f64) -> f64 {
    SQRT_2 * Float::sqrt(1e3) * probe_rabi_mhz
}

/// Circulator with a scalar background power leakage `R_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirculatorModel {
    pub leakage: f64,
}

impl CirculatorModel {
    pub const IDEAL: Self = Self { leakage: 0.0 };

    pub fn validate(&self) -> Result<()> {
        if (0.0..1.0).contains(&self.leakage) {
            Ok(())
        } else {
            Err(Error::InvalidParameter { name: "leakage", reason: "must lie in [0, 1)" })
        }
    }
}

/// Whether probe and control share an input port. The point-like atom
/// radiates symmetrically into both directions, so this does not change the
/// result; it is carried for bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlInjection {
    #[default]
    Opposite,
    Same,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoutingSample {
    pub t_ns: f64,
    pub control_rabi_mhz: f64,
    pub scatter: ScatterResult,
    /// Fractions of the probe input power.
    pub port1: f64,
    pub port2: f64,
    pub lost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTrace {
    pub samples: Vec<RoutingSample>,
    /// Steady-state transmittance with the control off.
    pub t_off: f64,
    /// Steady-state transmittance at the peak control amplitude.
    pub t_on: f64,
    /// `R_on_off` measured at the sample nearest the pulse centre.
    pub r_on_off: f64,
    /// `T_on_off/T₀` at the same sample.
    pub t_on_off: f64,
    /// 10–90 % rise and fall of `T(t)` between `t_off` and `t_on`.
    pub rise_ns: Option<f64>,
    pub fall_ns: Option<f64>,
}

impl RoutingTrace {
    pub fn peak_transmittance(&self) -> f64 {
        self.samples.iter().map(|s| s.scatter.transmittance()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sample closest to `t_ns`.
    pub fn sample_near(&self, t_ns: f64) -> Option<&RoutingSample> {
        self.samples.iter().min_by(|a, b| Float::abs(a.t_ns - t_ns).total_cmp(&Float::abs(b.t_ns - t_ns)))
    }
}

/// Minimum grid points across the pulse half-maximum window.
pub const MIN_POINTS_PER_WIDTH: usize = 8;

/// Time-domain routing of a weak probe switched by a control pulse.
///
/// The ladder is integrated with the control envelope and the probe
/// transmission follows from the instantaneous 0-1 coherence. The background
/// leakage `R_b` diverts a fraction `R_b/(1+R_b)` of the input to port 1
/// ahead of the atom, so the port-1 on/off ratio is exactly
/// `(R_on + R_b)/(R_off + R_b)` and total power is conserved.
pub fn simulate_routing(
    params: &DeviceParams,
    probe: &DriveTone,
    control: &PulseEnvelope,
    circ: &CirculatorModel,
    _injection: ControlInjection,
    t_grid: &[f64],
) -> Result<RoutingTrace> {
    control.validate()?;
    circ.validate()?;
    if probe.target != Transition::ZeroOne {
        return Err(Error::InvalidParameter { name: "probe", reason: "probe must address the 0-1 transition" });
    }
    let probe_rabi = rabi_from_power(params, probe)?;
    if t_grid.len() < 2 {
        return Err(Error::InvalidTimeGrid);
    }
    let (lo, hi) = control.half_max_window();
    let covered = t_grid.iter().filter(|&&t| t >= lo && t <= hi).count();
    let window_in_grid = hi > t_grid[0] && lo < t_grid[t_grid.len() - 1];
    if window_in_grid && covered < MIN_POINTS_PER_WIDTH {
        return Err(Error::Resolution { points: covered, required: MIN_POINTS_PER_WIDTH });
    }

    let sys = LadderSystem::resonant(params, probe_rabi, 0.0)?;
    let gen = build_generator(&sys)?;
    let steady_at = |control_rabi: f64| -> Result<ScatterResult> {
        let s = LadderSystem { control_rabi, ..sys };
        scattering_from_state(&s, &steady_state(&build_generator(&s)?)?)
    };
    let off = steady_at(0.0)?;
    let on = steady_at(control.amplitude())?;

    let rho0 = steady_state(&build_generator(&LadderSystem { control_rabi: control.value(t_grid[0]), ..sys })?)?;
    let driven = DrivenLiouvillian {
        gen: &gen,
        probe: |_t: f64| probe_rabi,
        control: |t: f64| control.value(t),
        breakpoints: control.breakpoints(),
    };
    let traj = evolve(&driven, &rho0, t_grid, &EvolveOptions::default())?;

    let norm = 1.0 + circ.leakage;
    let port1_of = |r: f64| (r + circ.leakage) / norm;
    let mut samples = Vec::with_capacity(t_grid.len());
    for (&t, rho) in traj.times.iter().zip(&traj.states) {
        let scatter = scattering_from_state(&sys, rho)?;
        let (tt, rr) = (scatter.transmittance(), scatter.reflectance());
        samples.push(RoutingSample {
            t_ns: t,
            control_rabi_mhz: control.value(t),
            scatter,
            port1: port1_of(rr),
            port2: tt / norm,
            lost: (1.0 - tt - rr) / norm,
        });
    }

    // On-state ratios at the sample nearest the pulse centre, which avoids the
    // switching transient of a square pulse.
    let mid = 0.5 * (lo + hi);
    let best = samples
        .iter()
        .min_by(|a, b| Float::abs(a.t_ns - mid).total_cmp(&Float::abs(b.t_ns - mid)))
        .copied()
        .ok_or(Error::InvalidTimeGrid)?;
    let port2_far_detuned = 1.0 / norm;
    let (t_off, t_on) = (off.transmittance(), on.transmittance());
    let series: Vec<(f64, f64)> = samples.iter().map(|s| (s.t_ns, s.scatter.transmittance())).collect();
    let (rise_ns, fall_ns) = transition_times(&series, t_off, t_on);
    Ok(RoutingTrace {
        r_on_off: best.port1 / port1_of(off.reflectance()),
        t_on_off: best.port2 / port2_far_detuned,
        samples,
        t_off,
        t_on,
        rise_ns,
        fall_ns,
    })
}

/// 10–90 % rise and subsequent 90–10 % fall of `series` between the levels
/// `low` and `high`, with linear interpolation between samples.
pub fn transition_times(series: &[(f64, f64)], low: f64, high: f64) -> (Option<f64>, Option<f64>) {
    let span = high - low;
    if !(span > 0.0) {
        return (None, None);
    }
    let l10 = low + 0.1 * span;
    let l90 = low + 0.9 * span;
    let crossing = |from: usize, level: f64, upward: bool| -> Option<(usize, f64)> {
        (from.max(1)..series.len()).find_map(|i| {
            let (t0, y0) = series[i - 1];
            let (t1, y1) = series[i];
            let hit = if upward { y0 < level && y1 >= level } else { y0 > level && y1 <= level };
            hit.then(|| (i, t0 + (level - y0) / (y1 - y0) * (t1 - t0)))
        })
    };
    let Some((i10, t10)) = crossing(1, l10, true) else { return (None, None) };
    let Some((i90, t90)) = crossing(i10, l90, true) else { return (None, None) };
    let rise = Some(t90 - t10);
    let fall = crossing(i90, l90, false).and_then(|(j90, f90)| crossing(j90, l10, false).map(|(_, f10)| f10 - f90));
    (rise, fall)
}

/// Steady-state probe scattering off a stage whose control is detuned from
/// its 1-2 transition by `control_detuning_mhz`; used to gauge cross-talk
/// between stages with nearby 1-2 frequencies.
pub fn control_crosstalk(
    params: &DeviceParams,
    probe_rabi_mhz: f64,
    control_rabi_mhz: f64,
    control_detuning_mhz: f64,
) -> Result<ScatterResult> {
    let sys = LadderSystem::detuned(params, 0.0, control_detuning_mhz, probe_rabi_mhz, control_rabi_mhz)?;
    scattering_from_state(&sys, &steady_state(&build_generator(&sys)?)?)
}

/// One atom of a cascade followed by its circulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub label: String,
    pub params: DeviceParams,
    /// Control Rabi frequency applied when this stage's tone is on.
    pub control_rabi_mhz: f64,
    pub circulator: CirculatorModel,
}

impl Stage {
    pub fn omega12_ghz(&self) -> Result<f64> {
        Ok(transition_frequencies(&self.params)?.1)
    }

    /// `(T, R)` with the control on or off.
    pub fn response(&self, on: bool) -> Result<(f64, f64)> {
        let s = if on { eit_transmission(&self.params, self.control_rabi_mhz)? } else { reflection_two_level(&self.params, 0.0)? };
        Ok((s.transmittance(), s.reflectance()))
    }
}

/// Controls closer than this to a stage's 1-2 frequency select it.
pub const CONTROL_MATCH_GHZ: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct RouterNetwork {
    stages: Vec<Stage>,
}

impl RouterNetwork {
    /// Validates that all stages share ω₀₁ within `omega01_tolerance_ghz` and
    /// have pairwise distinct ω₁₂.
    pub fn new(stages: Vec<Stage>, omega01_tolerance_ghz: f64) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidNetwork("network needs at least one stage"));
        }
        if stages.len() > 16 {
            return Err(Error::InvalidNetwork("at most 16 stages are supported"));
        }
        let mut freqs = Vec::with_capacity(stages.len());
        for s in &stages {
            s.circulator.validate()?;
            if !(s.control_rabi_mhz >= 0.0) {
                return Err(Error::InvalidParameter { name: "control_rabi_mhz", reason: "must be non-negative" });
            }
            freqs.push(transition_frequencies(&s.params)?);
        }
        let w01 = freqs[0].0;
        if freqs.iter().any(|f| Float::abs(f.0 - w01) > omega01_tolerance_ghz) {
            return Err(Error::InvalidNetwork("stages must share the 0-1 transition frequency"));
        }
        for i in 0..freqs.len() {
            for j in (i + 1)..freqs.len() {
                if Float::abs(freqs[i].1 - freqs[j].1) <= 2.0 * CONTROL_MATCH_GHZ {
                    return Err(Error::InvalidNetwork("stage 1-2 frequencies must be pairwise distinct"));
                }
            }
        }
        Ok(Self { stages })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn port_count(&self) -> usize {
        self.stages.len() + 1
    }

    /// Stage indices switched on by control tones at `controls_ghz`.
    pub fn active_mask(&self, controls_ghz: &[f64]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.stages.len()];
        for &f in controls_ghz {
            let mut hit = false;
            for (k, s) in self.stages.iter().enumerate() {
                if Float::abs(s.omega12_ghz()? - f) <= CONTROL_MATCH_GHZ {
                    mask[k] = true;
                    hit = true;
                }
            }
            if !hit {
                return Err(Error::UnknownControl { freq_ghz: f });
            }
        }
        Ok(mask)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkOutcome {
    /// Power fraction at ports `1..=n+1` (index 0 is port 1).
    pub port_fraction: Vec<f64>,
    /// Port powers in W.
    pub port_power_w: Vec<f64>,
    /// Incoherent or otherwise lost fraction.
    pub lost_fraction: f64,
}

/// Power cascade through the network for the given control tones.
///
/// Stage `k` sees power `P_k`; it sends `(1 − R_b)R_k P_k` to port `k`, passes
/// `(T_k + R_b R_k)P_k` forward and loses the incoherent remainder. The last
/// stage's forward power exits at port `n+1`.
pub fn route_network(net: &RouterNetwork, probe_power_w: f64, controls_ghz: &[f64]) -> Result<NetworkOutcome> {
    if !(probe_power_w >= 0.0 && probe_power_w.is_finite()) {
        return Err(Error::Domain("probe power must be finite and non-negative"));
    }
    let mask = net.active_mask(controls_ghz)?;
    route_mask(net, probe_power_w, &mask)
}

fn route_mask(net: &RouterNetwork, probe_power_w: f64, mask: &[bool]) -> Result<NetworkOutcome> {
    let mut forward = 1.0;
    let mut port_fraction = Vec::with_capacity(net.port_count());
    let mut lost = 0.0;
    for (stage, &on) in net.stages.iter().zip(mask) {
        let (t, r) = stage.response(on)?;
        let leak = stage.circulator.leakage;
        port_fraction.push(forward * (1.0 - leak) * r);
        lost += forward * (1.0 - t - r);
        forward *= t + leak * r;
    }
    port_fraction.push(forward);
    let port_power_w = port_fraction.iter().map(|f| f * probe_power_w).collect();
    Ok(NetworkOutcome { port_fraction, port_power_w, lost_fraction: lost })
}

/// Contrast values at or above this are reported as capped.
pub const CONTRAST_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Subset outside the control table.
    Unscored,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub active: Vec<bool>,
    pub outcome: NetworkOutcome,
    /// Dominant port, 1-based.
    pub dominant_port: usize,
    /// Dominant-port power over the largest other port, capped at
    /// [`CONTRAST_CAP`].
    pub contrast: f64,
    pub capped: bool,
    pub intended_port: Option<usize>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTableReport {
    pub rows: Vec<TableRow>,
    pub contrast_min: f64,
}

impl RoutingTableReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }
}

/// Evaluates every control subset. The table rows are the prefixes: tones on
/// the first `j` stages route the probe to port `j+1`.
pub fn routing_table_verify(net: &RouterNetwork, contrast_min: f64) -> Result<RoutingTableReport> {
    let n = net.stages.len();
    let mut rows = Vec::with_capacity(1 << n);
    for bits in 0u32..(1u32 << n) {
        let active: Vec<bool> = (0..n).map(|k| bits & (1 << k) != 0).collect();
        let outcome = route_mask(net, 1.0, &active)?;
        let (dominant, top) = outcome
            .port_fraction
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        let other = outcome
            .port_fraction
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != dominant)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max);
        let raw = if other > 0.0 { top / other } else { f64::INFINITY };
        let capped = raw >= CONTRAST_CAP;
        let contrast = if capped { CONTRAST_CAP } else { raw };
        let prefix = active.iter().take_while(|a| **a).count();
        let is_prefix = active.iter().skip(prefix).all(|a| !a);
        let intended_port = is_prefix.then_some(prefix + 1);
        let verdict = match intended_port {
            None => Verdict::Unscored,
            Some(p) if p == dominant + 1 && contrast >= contrast_min => Verdict::Pass,
            Some(_) => Verdict::Fail,
        };
        rows.push(TableRow { active, outcome, dominant_port: dominant + 1, contrast, capped, intended_port, verdict });
    }
    Ok(RoutingTableReport { rows, contrast_min })
}
