//! Scenario files: sectioned TOML with one table per concern.
//!
//! ```toml
//! [scenario]
//! kind = "extinction-sweep"
//!
//! [device]
//! ej_max_ghz = 12.7
//! ec_ghz = 0.59
//! gamma10_mhz = 73.0
//! gamma_phi_mhz = 18.0
//! gamma20_mhz = 145.0
//! coupling_mode = "radiative"
//!
//! [sweep]
//! variable = "photon_number"
//! start = 0.01
//! stop = 100.0
//! points = 41
//! scale = "log"
//! ```
//!
//! Parsing is strict: unknown keys are rejected. [`Scenario::normalized`]
//! fills every defaultable key so that a normalized scenario serializes to a
//! fixed point.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use wqed_core::device::{transition_frequencies, Coupling, DeviceParams, DriveTone, Strength};
use wqed_core::router::{CirculatorModel, PulseEnvelope};
use wqed_core::units::dbm_to_watts;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ExtinctionSweep,
    TwoTone,
    EitSweep,
    OnoffSweep,
    RoutePulse,
    Network,
    Fit,
    Spectrum,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::ExtinctionSweep => "extinction-sweep",
            Kind::TwoTone => "two-tone",
            Kind::EitSweep => "eit-sweep",
            Kind::OnoffSweep => "onoff-sweep",
            Kind::RoutePulse => "route-pulse",
            Kind::Network => "network",
            Kind::Fit => "fit",
            Kind::Spectrum => "spectrum",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingMode {
    Direct,
    Circuit,
    /// `k` implied by purely radiative coupling at the 0-1 frequency.
    Radiative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Square,
    Gaussian,
    /// Continuous control at the tone amplitude.
    Cw,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    pub ej_max_ghz: f64,
    pub ec_ghz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<f64>,
    pub gamma10_mhz: f64,
    pub gamma_phi_mhz: f64,
    pub gamma20_mhz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0_ohm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_mode: Option<CouplingMode>,
    /// Direct calibration `Ω/2π = k√P`, MHz/√W.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cc_over_csigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_override_ghz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
}

/// A probe tone; at most one of the strength keys may be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photon_number: Option<f64>,
}

/// The pump of a two-tone map: a fixed amplitude, or a second sweep over
/// its Rabi frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    /// `"zero-one"` or `"one-two"`.
    pub transition: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fwhm_ns: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirculatorSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_background: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_ns: Option<f64>,
    pub stop_ns: f64,
    pub step_ns: f64,
}

/// One atom of a cascade. Device keys left unset are inherited from
/// `[device]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSection {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ej_max_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ec_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma10_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_phi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma20_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_override_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_rabi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_background: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contrast_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega01_tolerance_ghz: Option<f64>,
    /// Target on-state transmittance used for stages without an explicit
    /// control amplitude.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_on: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_power_w: Option<f64>,
    #[serde(rename = "stage")]
    pub stages: Vec<StageSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSection {
    /// Relative (multiplicative) Gaussian noise level.
    pub noise: f64,
    pub points: usize,
    pub trials: usize,
    /// Range of the swept quantity: photon number for `eq1_power`, control
    /// Rabi MHz for `eq4_onoff`.
    pub start: f64,
    pub stop: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transmission_data: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameterization: Option<String>,
    /// Parameter names held at their initial value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_gamma10_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_gamma_phi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_coupling_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_gamma20_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_r_background: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_rabi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_detuning_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_rabi_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_over_gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub padding: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Write a gnuplot script next to tabular output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub scenario: ScenarioSection,
    pub device: DeviceSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circulator: Option<CirculatorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default)]
    pub output: OutputSection,
}

pub const DEFAULT_PROBE_RABI_MHZ: f64 = 0.1;
pub const DEFAULT_SEED: u64 = 1;

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut s = Self::parse(&text)?;
        s.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(s)
    }

    /// Relative data paths are taken relative to the config file.
    fn resolve_paths(&mut self, base: &Path) {
        if let Some(fit) = &mut self.fit {
            for p in [&mut fit.data, &mut fit.transmission_data].into_iter().flatten() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario is always representable as TOML")
    }

    /// Fills every key that has a fixed default. Normalizing twice is the
    /// same as normalizing once.
    pub fn normalized(&self) -> Self {
        let mut s = self.clone();
        s.scenario.seed.get_or_insert(DEFAULT_SEED);
        let d = &mut s.device;
        d.flux.get_or_insert(0.0);
        d.z0_ohm.get_or_insert(50.0);
        if d.coupling_mode.is_none() {
            d.coupling_mode = if d.coupling_k.is_some() {
                Some(CouplingMode::Direct)
            } else if d.cc_over_csigma.is_some() {
                Some(CouplingMode::Circuit)
            } else {
                None
            };
        }
        for sw in [s.sweep.as_mut(), s.pump.as_mut().and_then(|p| p.sweep.as_mut())].into_iter().flatten() {
            sw.scale.get_or_insert(Scale::Linear);
        }
        if let Some(p) = &mut s.probe {
            let set = [p.rabi_mhz, p.power_w, p.power_dbm, p.photon_number].iter().filter(|v| v.is_some()).count();
            if set == 0 {
                p.rabi_mhz = Some(DEFAULT_PROBE_RABI_MHZ);
            }
        }
        if let Some(c) = &mut s.control {
            c.shape.get_or_insert(Shape::Cw);
        }
        if let Some(c) = &mut s.circulator {
            c.r_background.get_or_insert(0.0);
        }
        if let Some(t) = &mut s.time {
            t.start_ns.get_or_insert(0.0);
        }
        if let Some(n) = &mut s.network {
            n.contrast_min.get_or_insert(2.0);
            n.omega01_tolerance_ghz.get_or_insert(1e-3);
            n.t_on.get_or_insert(0.81);
            n.probe_power_w.get_or_insert(1e-16);
        }
        if let Some(f) = &mut s.fit {
            f.parameterization.get_or_insert_with(|| "log".into());
            f.bootstrap.get_or_insert(0);
            if f.fixed.is_none() && f.model == "eq1_power" {
                f.fixed = Some(vec!["coupling_k".into()]);
            }
            let default_scale = if f.model == "eq1_power" { Scale::Log } else { Scale::Linear };
            if let Some(syn) = &mut f.synthetic {
                syn.scale.get_or_insert(default_scale);
            }
        }
        if let Some(sp) = &mut s.spectrum {
            sp.probe_detuning_mhz.get_or_insert(0.0);
            sp.control_rabi_mhz.get_or_insert(0.0);
            sp.points.get_or_insert(4096);
            sp.horizon_over_gamma.get_or_insert(50.0);
            sp.padding.get_or_insert(4);
        }
        s.output.format.get_or_insert(Format::Csv);
        s.output.plot.get_or_insert(true);
        s
    }

    pub fn seed(&self) -> u64 {
        self.scenario.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Device parameters with the configured power calibration.
    pub fn device_params(&self) -> Result<DeviceParams> {
        device_params(&self.device)
    }

    pub fn r_background(&self) -> f64 {
        self.circulator.as_ref().and_then(|c| c.r_background).unwrap_or(0.0)
    }

    pub fn circulator(&self) -> CirculatorModel {
        CirculatorModel { leakage: self.r_background() }
    }

    /// The probe tone, defaulting to a weak resonant tone on ω₀₁.
    pub fn probe_tone(&self, params: &DeviceParams) -> Result<DriveTone> {
        let (w01, _) = transition_frequencies(params)?;
        let default = ProbeSection::default();
        let p = self.probe.as_ref().unwrap_or(&default);
        let f = p.frequency_ghz.unwrap_or(w01);
        let strength = probe_strength(p, f, params.gamma10_mhz)?;
        Ok(DriveTone::probe(f, strength))
    }

    pub fn control_envelope(&self, default_amplitude: f64) -> Result<PulseEnvelope> {
        let c = require(&self.control, "control")?;
        let amp = c.rabi_mhz.unwrap_or(default_amplitude);
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| CliError::config(format!("missing key control.{key}")));
        match c.shape.unwrap_or(Shape::Cw) {
            Shape::Square => Ok(PulseEnvelope::Square {
                amplitude: amp,
                start_ns: need(c.start_ns, "start_ns")?,
                duration_ns: need(c.duration_ns, "duration_ns")?,
            }),
            Shape::Gaussian => Ok(PulseEnvelope::Gaussian {
                amplitude: amp,
                center_ns: need(c.center_ns, "center_ns")?,
                fwhm_ns: need(c.fwhm_ns, "fwhm_ns")?,
            }),
            Shape::Cw => Err(CliError::config("control.shape must be square or gaussian for a pulse")),
        }
    }

    pub fn time_grid(&self) -> Result<Vec<f64>> {
        let t = require(&self.time, "time")?;
        let start = t.start_ns.unwrap_or(0.0);
        if !(t.step_ns > 0.0 && t.stop_ns > start) {
            return Err(CliError::config("time.stop_ns must exceed time.start_ns and time.step_ns must be positive"));
        }
        let n = ((t.stop_ns - start) / t.step_ns + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| start + i as f64 * t.step_ns).collect())
    }
}

pub fn require<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| CliError::config(format!("missing section [{name}]")))
}

pub fn device_params(d: &DeviceSection) -> Result<DeviceParams> {
    let mut p = DeviceParams {
        ej_max_ghz: d.ej_max_ghz,
        ec_ghz: d.ec_ghz,
        flux: d.flux.unwrap_or(0.0),
        gamma10_mhz: d.gamma10_mhz,
        gamma_phi_mhz: d.gamma_phi_mhz,
        gamma20_mhz: d.gamma20_mhz,
        z0_ohm: d.z0_ohm.unwrap_or(50.0),
        coupling: None,
        alpha_override_ghz: d.alpha_override_ghz,
    };
    let mode = d.coupling_mode.or(if d.coupling_k.is_some() {
        Some(CouplingMode::Direct)
    } else if d.cc_over_csigma.is_some() {
        Some(CouplingMode::Circuit)
    } else {
        None
    });
    p.coupling = match mode {
        None => None,
        Some(CouplingMode::Direct) => Some(Coupling::Direct {
            k: d.coupling_k.ok_or_else(|| CliError::config("missing key device.coupling_k (coupling_mode = \"direct\")"))?,
        }),
        Some(CouplingMode::Circuit) => Some(Coupling::Circuit {
            cc_over_csigma: d
                .cc_over_csigma
                .ok_or_else(|| CliError::config("missing key device.cc_over_csigma (coupling_mode = \"circuit\")"))?,
        }),
        Some(CouplingMode::Radiative) => {
            let (w01, _) = transition_frequencies(&p)?;
            Some(Coupling::radiative(p.gamma10_mhz, w01))
        }
    };
    p.validate()?;
    Ok(p)
}

fn probe_strength(p: &ProbeSection, f_ghz: f64, gamma10: f64) -> Result<Strength> {
    let given = [p.rabi_mhz.is_some(), p.power_w.is_some(), p.power_dbm.is_some(), p.photon_number.is_some()];
    if given.iter().filter(|g| **g).count() > 1 {
        return Err(CliError::config("probe: set only one of rabi_mhz, power_w, power_dbm, photon_number"));
    }
    Ok(if let Some(w) = p.power_w {
        Strength::Power(w)
    } else if let Some(dbm) = p.power_dbm {
        Strength::Power(dbm_to_watts(dbm))
    } else if let Some(n) = p.photon_number {
        Strength::Power(wqed_core::device::power_for_n(n, f_ghz, gamma10)?)
    } else {
        Strength::Rabi(p.rabi_mhz.unwrap_or(DEFAULT_PROBE_RABI_MHZ))
    })
}

/// Points of a sweep section.
pub fn sweep_values(s: &SweepSection) -> Result<Vec<f64>> {
    if s.points == 0 {
        return Err(CliError::config(format!("sweep over {} has no points", s.variable)));
    }
    if !(s.start.is_finite() && s.stop.is_finite()) || (s.points > 1 && s.start == s.stop) {
        return Err(CliError::config(format!("sweep over {} has an empty range", s.variable)));
    }
    let n = s.points;
    let frac = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
    match s.scale.unwrap_or_default() {
        Scale::Linear => Ok((0..n).map(|i| s.start + (s.stop - s.start) * frac(i)).collect()),
        Scale::Log => {
            if !(s.start > 0.0 && s.stop > 0.0) {
                return Err(CliError::config(format!("log sweep over {} needs positive bounds", s.variable)));
            }
            let (a, b) = (s.start.ln(), s.stop.ln());
            Ok((0..n).map(|i| (a + (b - a) * frac(i)).exp()).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXTINCTION: &str = include_str!("../../../scenarios/extinction.toml");

    #[test]
    fn normalize_is_idempotent_and_round_trips() {
        let once = Scenario::parse(EXTINCTION).unwrap().normalized();
        let again = Scenario::parse(&once.to_toml()).unwrap().normalized();
        assert_eq!(once, again);
        assert_eq!(once.to_toml(), again.to_toml());
    }

    #[test]
    fn log_sweep_hits_both_ends_and_decades() {
        let s = SweepSection { variable: "photon_number".into(), start: 0.01, stop: 100.0, points: 5, scale: Some(Scale::Log) };
        let v = sweep_values(&s).unwrap();
        for (got, want) in v.iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
            assert!((got / want - 1.0).abs() < 1e-12, "{got} vs {want}");
        }
        let bad = SweepSection { start: 0.0, ..s };
        assert!(matches!(sweep_values(&bad), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = EXTINCTION.replace("gamma20_mhz", "gamma_20_mhz");
        let err = Scenario::parse(&text).unwrap_err();
        assert!(err.to_string().contains("gamma_20_mhz"), "{err}");
    }
}
