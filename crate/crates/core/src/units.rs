//! Physical constants (CODATA exact SI values) and unit conversions.

use core::f64::consts::TAU;
use num_traits::Float;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / TAU;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// `dBm -> W`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * Float::powf(10.0, dbm / 10.0)
}

/// `W -> dBm`. Zero power maps to `-inf`.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * Float::log10(watts / 1e-3)
}

/// Cyclic MHz to angular rad/ns.
#[inline]
pub fn mhz_to_angular(mhz: f64) -> f64 {
    TAU * mhz * 1e-3
}

/// Angular rad/ns to cyclic MHz.
#[inline]
pub fn angular_to_mhz(rad_per_ns: f64) -> f64 {
    rad_per_ns / TAU * 1e3
}
