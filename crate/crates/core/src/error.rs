use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("degenerate transmon spectrum: E_J(flux) = {ej_ghz} GHz is not positive")]
    DegenerateSpectrum { ej_ghz: f64 },

    #[error("value out of domain: {0}")]
    Domain(&'static str),

    #[error("configuration error: {0}")]
    Configuration(&'static str),

    #[error("ladder has no unique steady state (pivot {pivot:e})")]
    NoUniqueSteadyState { pivot: f64 },

    #[error("scattering amplitude undefined: the probe Rabi frequency is zero")]
    UndefinedScattering,

    #[error("integrator step size underflow at t = {t_ns} ns")]
    Stiffness { t_ns: f64 },

    #[error("time grid must be strictly increasing with at least two points")]
    InvalidTimeGrid,

    #[error("probe at {probe_ghz} GHz is closer to the pump transition than to its own; single-frame model is ambiguous")]
    AmbiguousFrame { probe_ghz: f64 },

    #[error("correlation tail not converged: |g(tau_max)|/|g(0)| = {ratio:e}; increase the horizon")]
    HorizonTooShort { ratio: f64 },

    #[error("time grid too coarse: {points} points across the pulse width, need at least {required}")]
    Resolution { points: usize, required: usize },

    #[error("control tone at {freq_ghz} GHz matches no stage")]
    UnknownControl { freq_ghz: f64 },

    #[error("invalid network: {0}")]
    InvalidNetwork(&'static str),

    #[error("invalid dataset: {0}")]
    InvalidDataset(&'static str),

    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    #[error("unknown model id")]
    UnknownModel,
}
