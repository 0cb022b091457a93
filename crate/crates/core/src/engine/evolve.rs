use alloc::vec::Vec;
use num_traits::Float;

use super::density::DensityMatrix3;
use super::generator::Liouvillian;
use crate::error::{Error, Result};
use crate::units::mhz_to_angular;

/// Right-hand side of the master equation in the real parameterization.
pub trait Generator {
    fn derivative(&self, t_ns: f64, x: &[f64; 9], dx: &mut [f64; 9]);

    /// Times at which the drive is discontinuous; steps never straddle them.
    fn breakpoints(&self) -> &[f64] {
        &[]
    }
}

impl Generator for Liouvillian {
    fn derivative(&self, _t: f64, x: &[f64; 9], dx: &mut [f64; 9]) {
        self.real().apply(x, dx)
    }
}

/// Ladder with time-dependent Rabi envelopes (cyclic MHz as a function of ns).
/// The system's own constant Rabi frequencies are ignored.
pub struct DrivenLiouvillian<'a, P, C> {
    pub gen: &'a Liouvillian,
    pub probe: P,
    pub control: C,
    pub breakpoints: Vec<f64>,
}

impl<P, C> Generator for DrivenLiouvillian<'_, P, C>
where
    P: Fn(f64) -> f64,
    C: Fn(f64) -> f64,
{
    fn derivative(&self, t: f64, x: &[f64; 9], dx: &mut [f64; 9]) {
        let p = mhz_to_angular((self.probe)(t));
        let c = mhz_to_angular((self.control)(t));
        let g = self.gen;
        for i in 0..9 {
            let mut acc = 0.0;
            for j in 0..9 {
                acc += (g.base.0[i][j] + p * g.probe_unit.0[i][j] + c * g.control_unit.0[i][j]) * x[j];
            }
            dx[i] = acc;
        }
    }

    fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step, ns.
    pub initial_step: f64,
    /// Largest step, ns.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-9, initial_step: 1e-3, max_step: f64::INFINITY, max_steps: 5_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix3>,
    /// Accepted and rejected step counts.
    pub accepted: usize,
    pub rejected: usize,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates from `t_grid[0]` and records the state at every grid time.
pub fn evolve<G: Generator>(gen: &G, rho0: &DensityMatrix3, t_grid: &[f64], opts: &EvolveOptions) -> Result<Trajectory> {
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid);
    }
    let mut y = rho0.to_real();
    let mut t = t_grid[0];
    let mut h = opts.initial_step.min(opts.max_step);
    let mut k = [[0.0; 9]; 7];
    let mut fresh = true;
    let mut steps = 0usize;
    let mut traj = Trajectory { times: Vec::with_capacity(t_grid.len()), states: Vec::with_capacity(t_grid.len()), accepted: 0, rejected: 0 };
    traj.times.push(t);
    traj.states.push(DensityMatrix3::from_real(&y));

    let breaks = gen.breakpoints();
    for &target in &t_grid[1..] {
        while t < target {
            let stop = breaks
                .iter()
                .copied()
                .filter(|&b| b > t * (1.0 + 1e-15) + 1e-15 && b < target)
                .fold(target, f64::min);
            let span = stop - t;
            let natural = h;
            let mut last = false;
            if h >= span {
                h = span;
                last = true;
            }
            let t_end = t + h;
            // stage times are nudged inside the step so that envelope
            // discontinuities at either end are evaluated on the correct side
            let inner = 1e-12 * h;
            let stage_t = |c: f64| (t + c * h).clamp(t + inner, t_end - inner);

            if fresh {
                gen.derivative(stage_t(0.0), &y, &mut k[0]);
                fresh = false;
            }
            let mut ytmp = [0.0; 9];
            for s in 1..7 {
                for i in 0..9 {
                    let mut acc = y[i];
                    for (j, a) in A[s].iter().enumerate().take(s) {
                        acc += h * a * k[j][i];
                    }
                    ytmp[i] = acc;
                }
                gen.derivative(stage_t(C[s]), &ytmp, &mut k[s]);
            }
            // ytmp now holds the 5th-order solution (row 7 of A is b)
            let mut err = 0.0;
            for i in 0..9 {
                let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
                let sc = opts.atol + opts.rtol * Float::max(Float::abs(y[i]), Float::abs(ytmp[i]));
                err += (e / sc) * (e / sc);
            }
            let err = Float::sqrt(err / 9.0);

            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Stiffness { t_ns: t });
            }
            if err <= 1.0 {
                t = if last { stop } else { t_end };
                y = ytmp;
                k[0] = k[6];
                traj.accepted += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * Float::powf(err, -0.2)).clamp(0.2, 5.0) };
                if last {
                    // truncated onto a grid point or breakpoint: resume with
                    // the untruncated step and re-evaluate the derivative on
                    // the far side of a possible discontinuity
                    h = natural.min(opts.max_step);
                    fresh = true;
                } else {
                    h = (h * fac).min(opts.max_step);
                }
            } else {
                traj.rejected += 1;
                let fac = if err.is_finite() { (0.9 * Float::powf(err, -0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h *= fac;
                if h < 1e-13 * Float::max(1.0, Float::abs(t)) {
                    return Err(Error::Stiffness { t_ns: t });
                }
            }
        }
        traj.times.push(t);
        traj.states.push(DensityMatrix3::from_real(&y));
    }
    Ok(traj)
}
