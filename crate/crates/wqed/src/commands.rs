//! One driver per scenario kind. Each returns a table and a list of
//! `key=value` summary lines; writing them out is left to the caller.

use std::fmt::Display;
use std::path::Path;

use rayon::prelude::*;

use wqed_core::device::{
    photon_number, power_for_n, rabi_from_power, transition_frequencies, DeviceParams, DriveTone, Strength,
    Transition,
};
use wqed_core::engine::{emission_spectrum, steady_scattering, two_tone_point, LadderSystem, SpectrumOptions};
use wqed_core::fitting::{FitOptions, FitReport, ModelId, ParamSpec, Parameterization, SweepDataset};
use wqed_core::router::{
    default_control_rabi, routing_table_verify, simulate_routing, CirculatorModel, ControlInjection, RouterNetwork,
    Stage, Verdict,
};
use wqed_core::scattering::{control_for_transmission, eit_transmission, reflection_two_level, ScatterResult};
use wqed_core::units::{dbm_to_watts, watts_to_dbm};

use crate::config::{device_params, require, sweep_values, Kind, Scale, Scenario, SweepSection};
use crate::error::{CliError, Result};
use crate::montecarlo::{bootstrap, median_estimate, FitJob, RecoveryStudy};
use crate::table::{Table, Value};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub table: Table,
    pub summary: Vec<(String, String)>,
}

impl Outcome {
    fn new(table: Table) -> Self {
        Self { table, summary: Vec::new() }
    }

    fn note(&mut self, key: &str, value: impl Display) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn summary_text(&self) -> String {
        self.summary.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn execute(kind: Kind, s: &Scenario) -> Result<Outcome> {
    match kind {
        Kind::ExtinctionSweep => extinction_sweep(s),
        Kind::TwoTone => two_tone(s),
        Kind::EitSweep => eit_sweep(s),
        Kind::OnoffSweep => onoff_sweep(s),
        Kind::RoutePulse => route_pulse(s),
        Kind::Network => network(s),
        Kind::Fit => fit(s),
        Kind::Spectrum => spectrum(s),
    }
}

fn unknown_variable(command: &str, got: &str, allowed: &str) -> CliError {
    CliError::config(format!("{command}: sweep.variable `{got}` is not one of {allowed}"))
}

fn amplitude_columns(s: &ScatterResult) -> [Value; 4] {
    [s.t.re.into(), s.t.im.into(), s.r.re.into(), s.r.im.into()]
}

fn probe_rabi(s: &Scenario, params: &DeviceParams) -> Result<f64> {
    Ok(rabi_from_power(params, &s.probe_tone(params)?)?)
}

/// Transmittance versus probe power on resonance: closed form and engine.
///
/// `probe.frequency_ghz` only sets the photon energy used for the photon
/// number; the probe is resonant with the 0-1 transition.
pub fn extinction_sweep(s: &Scenario) -> Result<Outcome> {
    let params = s.device_params()?;
    let sweep = require(&s.sweep, "sweep")?;
    let xs = sweep_values(sweep)?;
    let (w01, _) = transition_frequencies(&params)?;
    let f = s.probe.as_ref().and_then(|p| p.frequency_ghz).unwrap_or(w01);
    let g = params.gamma10_mhz;
    let variable = sweep.variable.as_str();
    if !matches!(variable, "photon_number" | "power_w" | "power_dbm") {
        return Err(unknown_variable("extinction-sweep", variable, "photon_number, power_w, power_dbm"));
    }
    // Fail on a missing calibration before fanning out.
    rabi_from_power(&params, &DriveTone::probe(f, Strength::Power(1.0)))?;

    let rows: Vec<(Vec<Value>, f64)> = xs
        .par_iter()
        .map(|&x| -> Result<(Vec<Value>, f64)> {
            let power = match variable {
                "photon_number" => power_for_n(x, f, g)?,
                "power_w" => x,
                _ => dbm_to_watts(x),
            };
            let n = photon_number(power, f, g)?;
            let rabi = rabi_from_power(&params, &DriveTone::probe(f, Strength::Power(power)))?;
            let analytic = reflection_two_level(&params, rabi)?;
            let engine = steady_scattering(&LadderSystem::resonant(&params, rabi, 0.0)?)?;
            let mut row = vec![
                watts_to_dbm(power).into(),
                n.into(),
                analytic.transmittance().into(),
                engine.transmittance().into(),
                analytic.reflectance().into(),
                engine.reflectance().into(),
                power.into(),
                rabi.into(),
            ];
            row.extend(amplitude_columns(&engine));
            Ok((row, (engine.t - analytic.t).norm()))
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&[
        "power_dbm",
        "photon_number",
        "T_analytic",
        "T_engine",
        "R_analytic",
        "R_engine",
        "power_w",
        "rabi_mhz",
        "t_engine_re",
        "t_engine_im",
        "r_engine_re",
        "r_engine_im",
    ]);
    let max_dt = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    for (row, _) in rows {
        table.push(row);
    }
    let t = table.numbers("T_engine").unwrap_or_default();
    let mut out = Outcome::new(table);
    out.note("points", xs.len());
    out.note("probe_ghz", f);
    if let (Some(first), Some(last)) = (t.first(), t.last()) {
        out.note("T_first", first);
        out.note("T_last", last);
        out.note("extinction_first", 1.0 - first);
    }
    out.note("max_abs_dt", max_dt);
    Ok(out)
}

/// Transmission map of a weak probe next to a pump on the other transition.
pub fn two_tone(s: &Scenario) -> Result<Outcome> {
    let params = s.device_params()?;
    let pump = require(&s.pump, "pump")?;
    let sweep = require(&s.sweep, "sweep")?;
    let (w01, w12) = transition_frequencies(&params)?;
    let (target, own) = match pump.transition.as_str() {
        "one-two" => (Transition::OneTwo, w01),
        "zero-one" => (Transition::ZeroOne, w12),
        other => return Err(CliError::config(format!("pump.transition `{other}` is not zero-one or one-two"))),
    };
    let pump_ghz = pump.frequency_ghz.unwrap_or(if target == Transition::OneTwo { w12 } else { w01 });
    let amplitudes = match (&pump.sweep, pump.rabi_mhz) {
        (Some(ps), _) => {
            if ps.variable != "rabi_mhz" {
                return Err(unknown_variable("two-tone pump", &ps.variable, "rabi_mhz"));
            }
            sweep_values(ps)?
        }
        (None, Some(r)) => vec![r],
        (None, None) => return Err(CliError::config("missing key pump.rabi_mhz (or a [pump.sweep])")),
    };
    let probes: Vec<f64> = match sweep.variable.as_str() {
        "probe_ghz" => sweep_values(sweep)?,
        "probe_detuning_mhz" => sweep_values(sweep)?.into_iter().map(|d| own + d * 1e-3).collect(),
        other => return Err(unknown_variable("two-tone", other, "probe_ghz, probe_detuning_mhz")),
    };
    let probe_rabi = probe_rabi(s, &params)?;

    let grid: Vec<(f64, f64)> = amplitudes.iter().flat_map(|&a| probes.iter().map(move |&p| (a, p))).collect();
    let results: Vec<ScatterResult> = grid
        .par_iter()
        .map(|&(a, p)| {
            let tone = DriveTone { target, ..DriveTone::probe(pump_ghz, Strength::Rabi(a)) };
            Ok(two_tone_point(&params, &tone, p, probe_rabi)?)
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&[
        "pump_rabi_mhz",
        "probe_ghz",
        "probe_detuning_mhz",
        "T",
        "R",
        "t_re",
        "t_im",
        "r_re",
        "r_im",
    ]);
    for (&(a, p), r) in grid.iter().zip(&results) {
        let mut row = vec![a.into(), p.into(), ((p - own) * 1e3).into(), r.transmittance().into(), r.reflectance().into()];
        row.extend(amplitude_columns(r));
        table.push(row);
    }
    let mut out = Outcome::new(table);
    out.note("pump_ghz", pump_ghz);
    out.note("pump_points", amplitudes.len());
    out.note("probe_points", probes.len());
    let last = &results[results.len() - probes.len()..];
    let detunings: Vec<f64> = probes.iter().map(|p| (p - own) * 1e3).collect();
    let t: Vec<f64> = last.iter().map(ScatterResult::transmittance).collect();
    let minima = local_minima(&detunings, &t);
    out.note("minima_mhz", join(&minima));
    if minima.len() == 2 {
        let split = minima[1] - minima[0];
        out.note("split_mhz", split);
        if let Some(a) = amplitudes.last().filter(|a| **a > 0.0) {
            out.note("split_over_pump_rabi", split / a);
        }
    }
    Ok(out)
}

/// Abscissae of strict interior local minima, refined by a parabola through
/// the three neighbouring samples.
pub fn local_minima(x: &[f64], y: &[f64]) -> Vec<f64> {
    (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] < y[i - 1] && y[i] <= y[i + 1])
        .map(|i| {
            let denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
            let shift = if denom != 0.0 { 0.5 * (y[i - 1] - y[i + 1]) / denom } else { 0.0 };
            x[i] + shift * 0.5 * (x[i + 1] - x[i - 1])
        })
        .collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

fn control_values(command: &str, sweep: &SweepSection, params: &DeviceParams) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let xs = sweep_values(sweep)?;
    let powers = match sweep.variable.as_str() {
        "control_rabi_mhz" => return Ok((xs, None)),
        "control_power_w" => xs,
        "control_power_dbm" => xs.into_iter().map(dbm_to_watts).collect(),
        other => return Err(unknown_variable(command, other, "control_rabi_mhz, control_power_w, control_power_dbm")),
    };
    let w12 = transition_frequencies(params)?.1;
    let rabi = powers
        .iter()
        .map(|&p| Ok(rabi_from_power(params, &DriveTone::control(w12, Strength::Power(p)))?))
        .collect::<Result<_>>()?;
    Ok((rabi, Some(powers)))
}

/// Weak-probe transmission versus resonant control amplitude.
pub fn eit_sweep(s: &Scenario) -> Result<Outcome> {
    let params = s.device_params()?;
    let sweep = require(&s.sweep, "sweep")?;
    let (controls, powers) = control_values("eit-sweep", sweep, &params)?;
    let probe = probe_rabi(s, &params)?;
    let results: Vec<(ScatterResult, ScatterResult)> = controls
        .par_iter()
        .map(|&c| Ok((eit_transmission(&params, c)?, steady_scattering(&LadderSystem::resonant(&params, probe, c)?)?)))
        .collect::<Result<_>>()?;
    let mut cols = vec!["control_rabi_mhz", "T_analytic", "T_engine", "R_analytic", "R_engine"];
    cols.extend(["t_engine_re", "t_engine_im", "r_engine_re", "r_engine_im"]);
    if powers.is_some() {
        cols.push("control_power_w");
    }
    let mut table = Table::new(&cols);
    let mut max_dt: f64 = 0.0;
    for (i, (&c, (a, e))) in controls.iter().zip(&results).enumerate() {
        max_dt = max_dt.max((a.t - e.t).norm());
        let mut row = vec![
            c.into(),
            a.transmittance().into(),
            e.transmittance().into(),
            a.reflectance().into(),
            e.reflectance().into(),
        ];
        row.extend(amplitude_columns(e));
        if let Some(p) = &powers {
            row.push(p[i].into());
        }
        table.push(row);
    }
    let mut out = Outcome::new(table);
    out.note("points", controls.len());
    out.note("probe_rabi_mhz", probe);
    out.note("max_abs_dt", max_dt);
    Ok(out)
}

/// Normalized on/off ratios versus control amplitude, closed form and engine.
pub fn onoff_sweep(s: &Scenario) -> Result<Outcome> {
    let params = s.device_params()?;
    let sweep = require(&s.sweep, "sweep")?;
    let (controls, powers) = control_values("onoff-sweep", sweep, &params)?;
    let rb = s.r_background();
    s.circulator().validate()?;
    let probe = probe_rabi(s, &params)?;
    let r0_engine = steady_scattering(&LadderSystem::resonant(&params, probe, 0.0)?)?.reflectance();
    let r0 = eit_transmission(&params, 0.0)?.reflectance();
    let rows: Vec<[f64; 4]> = controls
        .par_iter()
        .map(|&c| {
            let a = eit_transmission(&params, c)?;
            let e = steady_scattering(&LadderSystem::resonant(&params, probe, c)?)?;
            Ok([
                (a.reflectance() + rb) / (r0 + rb),
                a.transmittance(),
                (e.reflectance() + rb) / (r0_engine + rb),
                e.transmittance(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut cols = vec!["control_rabi_mhz", "R_on_off", "T_on_off", "R_on_off_engine", "T_on_off_engine"];
    if powers.is_some() {
        cols.push("control_power_w");
    }
    let mut table = Table::new(&cols);
    let mut window = Vec::new();
    for (i, (&c, r)) in controls.iter().zip(&rows).enumerate() {
        if r[1] >= 0.80 && r[0] <= 0.15 {
            window.push(c);
        }
        let mut row: Vec<Value> = std::iter::once(c).chain(r.iter().copied()).map(Value::from).collect();
        if let Some(p) = &powers {
            row.push(p[i].into());
        }
        table.push(row);
    }
    let mut out = Outcome::new(table);
    out.note("points", controls.len());
    out.note("r_background", rb);
    out.note("routing_points", window.len());
    if let Some(first) = window.first() {
        out.note("routing_from_control_rabi_mhz", first);
    }
    Ok(out)
}

/// Time trace of a weak probe switched by a control pulse.
pub fn route_pulse(s: &Scenario) -> Result<Outcome> {
    let params = s.device_params()?;
    let probe = s.probe_tone(&params)?;
    let envelope = s.control_envelope(default_control_rabi(rabi_from_power(&params, &probe)?))?;
    let grid = s.time_grid()?;
    let circ = s.circulator();
    let trace = simulate_routing(&params, &probe, &envelope, &circ, ControlInjection::Opposite, &grid)?;
    let mut table = Table::new(&["t_ns", "control_rabi_mhz", "T", "R", "port1_frac", "port2_frac", "lost_frac"]);
    for x in &trace.samples {
        table.push(vec![
            x.t_ns.into(),
            x.control_rabi_mhz.into(),
            x.scatter.transmittance().into(),
            x.scatter.reflectance().into(),
            x.port1.into(),
            x.port2.into(),
            x.lost.into(),
        ]);
    }
    let mut out = Outcome::new(table);
    out.note("control_rabi_mhz", envelope.amplitude());
    out.note("T_off", trace.t_off);
    out.note("T_on", trace.t_on);
    out.note("T_peak", trace.peak_transmittance());
    out.note("R_on_off", trace.r_on_off);
    out.note("T_on_off", trace.t_on_off);
    out.note("rise_ns", trace.rise_ns.map_or("none".into(), |v| v.to_string()));
    out.note("fall_ns", trace.fall_ns.map_or("none".into(), |v| v.to_string()));
    Ok(out)
}

/// Stages of the `[network]` section with device defaults filled in.
pub fn network_stages(s: &Scenario) -> Result<Vec<Stage>> {
    let net = require(&s.network, "network")?;
    let t_on = net.t_on.unwrap_or(0.81);
    net.stages
        .iter()
        .map(|st| {
            let mut d = s.device.clone();
            d.ej_max_ghz = st.ej_max_ghz.unwrap_or(d.ej_max_ghz);
            d.ec_ghz = st.ec_ghz.unwrap_or(d.ec_ghz);
            d.flux = st.flux.or(d.flux);
            d.gamma10_mhz = st.gamma10_mhz.unwrap_or(d.gamma10_mhz);
            d.gamma_phi_mhz = st.gamma_phi_mhz.unwrap_or(d.gamma_phi_mhz);
            d.gamma20_mhz = st.gamma20_mhz.unwrap_or(d.gamma20_mhz);
            d.alpha_override_ghz = st.alpha_override_ghz.or(d.alpha_override_ghz);
            let params = device_params(&d)?;
            let control = match st.control_rabi_mhz {
                Some(c) => c,
                None => control_for_transmission(&params, t_on.sqrt()).ok_or_else(|| {
                    CliError::config(format!("stage {}: network.t_on = {t_on} is not reachable", st.label))
                })?,
            };
            Ok(Stage {
                label: st.label.clone(),
                params,
                control_rabi_mhz: control,
                circulator: CirculatorModel { leakage: st.r_background.unwrap_or(s.r_background()) },
            })
        })
        .collect()
}

/// Routing table of a cascade over every subset of control tones.
pub fn network(s: &Scenario) -> Result<Outcome> {
    let net_cfg = require(&s.network, "network")?;
    let stages = network_stages(s)?;
    let labels: Vec<String> = stages.iter().map(|st| st.label.clone()).collect();
    let w12: Vec<f64> = stages.iter().map(Stage::omega12_ghz).collect::<wqed_core::Result<_>>()?;
    let controls: Vec<f64> = stages.iter().map(|st| st.control_rabi_mhz).collect();
    let net = RouterNetwork::new(stages, net_cfg.omega01_tolerance_ghz.unwrap_or(1e-3))?;
    let contrast_min = net_cfg.contrast_min.unwrap_or(2.0);
    let power = net_cfg.probe_power_w.unwrap_or(1e-16);
    let report = routing_table_verify(&net, contrast_min)?;

    let ports = net.port_count();
    let mut cols: Vec<String> = ["row", "active", "intended_port", "dominant_port", "contrast", "capped", "verdict"]
        .iter()
        .map(|c| c.to_string())
        .collect();
    cols.extend((1..=ports).map(|p| format!("port{p}_frac")));
    cols.extend((1..=ports).map(|p| format!("port{p}_w")));
    cols.push("lost_frac".into());
    let mut table = Table::new(&cols);
    let mut out_lines = Vec::new();
    let (mut pass, mut fail) = (0, 0);
    for (i, row) in report.rows.iter().enumerate() {
        let active: Vec<&str> =
            labels.iter().zip(&row.active).filter(|(_, on)| **on).map(|(l, _)| l.as_str()).collect();
        let active = if active.is_empty() { "none".to_string() } else { active.join("+") };
        let verdict = match row.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Unscored => "unscored",
        };
        match row.verdict {
            Verdict::Pass => pass += 1,
            Verdict::Fail => fail += 1,
            Verdict::Unscored => {}
        }
        let mut values: Vec<Value> = vec![
            i.into(),
            active.clone().into(),
            row.intended_port.into(),
            row.dominant_port.into(),
            row.contrast.into(),
            row.capped.into(),
            verdict.into(),
        ];
        values.extend(row.outcome.port_fraction.iter().map(|&f| Value::from(f)));
        values.extend(row.outcome.port_fraction.iter().map(|&f| Value::from(f * power)));
        values.push(row.outcome.lost_fraction.into());
        table.push(values);
        if row.verdict != Verdict::Unscored {
            let contrast = if row.capped { "capped".to_string() } else { format!("{:.4}", row.contrast) };
            out_lines.push(format!(
                "active:{active} intended:{} dominant:{} contrast:{contrast} {verdict}",
                row.intended_port.unwrap_or(0),
                row.dominant_port
            ));
        }
    }
    let mut out = Outcome::new(table);
    out.note("stages", labels.len());
    for ((l, f), c) in labels.iter().zip(&w12).zip(&controls) {
        out.note(&format!("stage.{l}"), format!("omega12_ghz:{f:.6} control_rabi_mhz:{c:.4}"));
    }
    for line in out_lines {
        out.note("row", line);
    }
    out.note("contrast_min", contrast_min);
    out.note("pass_rows", pass);
    out.note("fail_rows", fail);
    out.note("all_pass", fail == 0);
    Ok(out)
}

/// Reads an `x,y,weight` file.
pub fn load_dataset(path: &Path) -> Result<SweepDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let headers = rdr.headers().map_err(|e| CliError::config(format!("{}: {e}", path.display())))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "y", "weight"] {
        return Err(CliError::config(format!("{}: header must be `x,y,weight`", path.display())));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let field = |j: usize| -> Result<f64> {
            rec[j].parse().map_err(|_| {
                CliError::config(format!("{}: line {}: `{}` is not a number", path.display(), i + 2, &rec[j]))
            })
        };
        rows.push((field(0)?, field(1)?, field(2)?));
    }
    Ok(SweepDataset::from_rows(&rows)?)
}

fn parse_model(name: &str) -> Result<ModelId> {
    match name.parse::<ModelId>() {
        Ok(ModelId::Eq4Transmission) | Err(_) => {
            Err(CliError::config(format!("fit.model `{name}` is not one of eq1_power, eq4_onoff")))
        }
        Ok(m) => Ok(m),
    }
}

/// Model, truth and starting point for a `[fit]` section.
pub fn fit_job(s: &Scenario) -> Result<(FitJob, Vec<f64>)> {
    let f = require(&s.fit, "fit")?;
    let params = s.device_params();
    let model = parse_model(&f.model)?;
    let names = model.parameter_names();
    let device = device_params_uncalibrated(s)?;
    let (truth, init): (Vec<f64>, Vec<f64>) = match model {
        ModelId::Eq1Power => {
            let k = match (f.init_coupling_k, &params) {
                (Some(k), _) => k,
                (None, Ok(p)) => {
                    let w01 = transition_frequencies(p)?.0;
                    rabi_from_power(p, &DriveTone::probe(w01, Strength::Power(1.0)))?
                }
                (None, Err(_)) => {
                    return Err(CliError::config("missing key fit.init_coupling_k (no device power calibration)"))
                }
            };
            let truth = vec![device.gamma10_mhz, device.gamma_phi_mhz, k];
            let init = vec![
                f.init_gamma10_mhz.unwrap_or(truth[0]),
                f.init_gamma_phi_mhz.unwrap_or(truth[1]),
                f.init_coupling_k.unwrap_or(truth[2]),
            ];
            (truth, init)
        }
        _ => {
            let rb = s.r_background();
            let fixed = [device.gamma10_mhz, device.gamma10_decoherence_mhz()];
            let truth = vec![device.gamma20_mhz, rb, fixed[0], fixed[1]];
            let rb0 = f.init_r_background.unwrap_or(if rb > 0.0 { rb } else { 0.1 });
            let init = vec![f.init_gamma20_mhz.unwrap_or(truth[0]), rb0, fixed[0], fixed[1]];
            (truth, init)
        }
    };
    let default_fixed: &[&str] = if model == ModelId::Eq1Power { &["coupling_k"] } else { &[] };
    let fixed: Vec<String> = f.fixed.clone().unwrap_or_else(|| default_fixed.iter().map(|s| s.to_string()).collect());
    for name in &fixed {
        if !names.contains(&name.as_str()) {
            return Err(CliError::config(format!("fit.fixed: unknown parameter `{name}`")));
        }
    }
    let specs = names
        .iter()
        .zip(&init)
        .enumerate()
        .map(|(i, (name, &v))| {
            let held = fixed.iter().any(|n| n == name) || (model == ModelId::Eq4OnOff && i >= 2);
            if held {
                ParamSpec::Fixed(v)
            } else {
                ParamSpec::Free(v)
            }
        })
        .collect();
    let parameterization = match f.parameterization.as_deref().unwrap_or("log") {
        "log" => Parameterization::Log,
        "linear" => Parameterization::Linear,
        other => return Err(CliError::config(format!("fit.parameterization `{other}` is not log or linear"))),
    };
    let options = FitOptions { parameterization, ..FitOptions::default() };
    Ok((FitJob { model, specs, options }, truth))
}

fn device_params_uncalibrated(s: &Scenario) -> Result<DeviceParams> {
    let mut d = s.device.clone();
    d.coupling_mode = None;
    d.coupling_k = None;
    d.cc_over_csigma = None;
    device_params(&d)
}

fn report_summary(out: &mut Outcome, r: &FitReport) {
    out.note("model", r.model.as_str());
    out.note("converged", r.converged);
    out.note("termination", r.termination.as_str());
    out.note("iterations", r.iterations);
    out.note("points", r.points);
    out.note("residual_norm", r.residual_norm);
    out.note("initial_residual_norm", r.initial_residual_norm);
    out.note("gradient_norm", r.gradient_norm);
    out.note("initial_gradient_norm", r.initial_gradient_norm);
    out.note("last_step_norm", r.last_step_norm);
    for p in &r.parameters {
        out.note(p.name, p.value);
        out.note(&format!("{}_sigma", p.name), p.uncertainty);
    }
}

/// Fits a measured dataset, or runs a seeded recovery study on synthetic
/// data when `[fit.synthetic]` is given.
pub fn fit(s: &Scenario) -> Result<Outcome> {
    let f = require(&s.fit, "fit")?;
    let (job, truth) = fit_job(s)?;
    match (&f.data, &f.synthetic) {
        (Some(_), Some(_)) => Err(CliError::config("fit: set either fit.data or [fit.synthetic], not both")),
        (None, None) => Err(CliError::config("missing key fit.data (or a [fit.synthetic] section)")),
        (Some(path), None) => {
            let data = load_dataset(path)?;
            let t = f.transmission_data.as_deref().map(load_dataset).transpose()?;
            let report = job.run(&data, t.as_ref())?;
            let boot = match f.bootstrap.unwrap_or(0) {
                0 => None,
                n => Some(bootstrap(&job, &data, &report, n, s.seed())),
            };
            let mut table = Table::new(&["parameter", "value", "uncertainty", "free", "bootstrap_sigma"]);
            for (i, p) in report.parameters.iter().enumerate() {
                let b = boot.as_ref().map(|b| b[i]).filter(|v| v.is_finite());
                table.push(vec![p.name.into(), p.value.into(), p.uncertainty.into(), p.free.into(), b.into()]);
            }
            let mut out = Outcome::new(table);
            report_summary(&mut out, &report);
            Ok(out)
        }
        (None, Some(syn)) => {
            let sweep = SweepSection {
                variable: "synthetic".into(),
                start: syn.start,
                stop: syn.stop,
                points: syn.points,
                scale: syn.scale.or(Some(if job.model == ModelId::Eq1Power { Scale::Log } else { Scale::Linear })),
            };
            let mut x = sweep_values(&sweep)?;
            if job.model == ModelId::Eq1Power {
                let params = device_params_uncalibrated(s)?;
                let f01 = s.probe.as_ref().and_then(|p| p.frequency_ghz).unwrap_or(transition_frequencies(&params)?.0);
                x = x.iter().map(|&n| power_for_n(n, f01, params.gamma10_mhz)).collect::<wqed_core::Result<_>>()?;
            }
            let study = RecoveryStudy {
                x,
                truth: truth.clone(),
                noise: syn.noise,
                trials: syn.trials,
                seed: s.seed(),
                joint_transmission: true,
            };
            let trials = study.run(&job);
            let names = job.model.parameter_names();
            let mut cols = vec!["trial", "converged"];
            cols.extend(names.iter().copied());
            cols.push("error");
            let mut table = Table::new(&cols);
            for t in &trials {
                let mut row: Vec<Value> = vec![t.index.into(), t.converged.into()];
                row.extend((0..names.len()).map(|i| Value::from(t.estimates.get(i).copied())));
                row.push(t.error.clone().into());
                table.push(row);
            }
            let mut out = Outcome::new(table);
            out.note("model", job.model.as_str());
            out.note("trials", trials.len());
            out.note("failed", trials.iter().filter(|t| t.error.is_some()).count());
            out.note("noise", syn.noise);
            out.note("seed", s.seed());
            for (i, name) in names.iter().enumerate() {
                if !job.specs[i].is_free() {
                    continue;
                }
                let m = median_estimate(&trials, i);
                out.note(&format!("median_{name}"), m);
                out.note(&format!("truth_{name}"), truth[i]);
                out.note(&format!("median_rel_err_{name}"), (m / truth[i] - 1.0).abs());
                out.note(&format!("median_abs_err_{name}"), (m - truth[i]).abs());
            }
            Ok(out)
        }
    }
}

/// Incoherent emission spectrum of the driven ladder.
pub fn spectrum(s: &Scenario) -> Result<Outcome> {
    let params = s.device_params_or_bare()?;
    let sp = require(&s.spectrum, "spectrum")?;
    let probe = sp.probe_rabi_mhz.ok_or_else(|| CliError::config("missing key spectrum.probe_rabi_mhz"))?;
    let sys = LadderSystem::detuned(
        &params,
        sp.probe_detuning_mhz.unwrap_or(0.0),
        0.0,
        probe,
        sp.control_rabi_mhz.unwrap_or(0.0),
    )?;
    let defaults = SpectrumOptions::default();
    let opts = SpectrumOptions {
        points: sp.points.unwrap_or(defaults.points),
        horizon_over_gamma: sp.horizon_over_gamma.unwrap_or(defaults.horizon_over_gamma),
        padding: sp.padding.unwrap_or(defaults.padding),
    };
    let spec = emission_spectrum(&sys, &opts)?;
    let mut table = Table::new(&["detuning_mhz", "density"]);
    for (&d, &v) in spec.detuning_mhz.iter().zip(&spec.density) {
        table.push(vec![d.into(), v.into()]);
    }
    let peaks = spec.peaks(0.05);
    let mut out = Outcome::new(table);
    out.note("integral", spec.integral());
    out.note("min_density", spec.density.iter().copied().fold(f64::INFINITY, f64::min));
    out.note("peaks_mhz", join(&peaks));
    if peaks.len() == 3 {
        out.note("sideband_split_mhz", peaks[2] - peaks[0]);
    }
    Ok(out)
}

impl Scenario {
    /// Device parameters; a broken power calibration is ignored because the
    /// caller only needs rates.
    fn device_params_or_bare(&self) -> Result<DeviceParams> {
        self.device_params().or_else(|_| device_params_uncalibrated(self))
    }
}
