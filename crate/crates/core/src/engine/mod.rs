//! Three-level ladder master equation in the doubly rotating frame.
//!
//! States are `|0⟩, |1⟩, |2⟩`; the probe addresses 0-1 and the control 1-2.
//! Internally the density matrix is carried as the nine real numbers
//! `[ρ₀₀, ρ₁₁, ρ₂₂, Re ρ₀₁, Im ρ₀₁, Re ρ₀₂, Im ρ₀₂, Re ρ₁₂, Im ρ₁₂]`, which
//! keeps every propagated state Hermitian. Time is in ns and rates are
//! converted to rad/ns on entry.

mod density;
mod evolve;
mod generator;
mod ladder;
mod scatter;
mod spectrum;
mod steady;

pub use density::DensityMatrix3;
pub use evolve::{evolve, DrivenLiouvillian, EvolveOptions, Generator, Trajectory};
pub use generator::{build_generator, Liouvillian, RealSuperoperator};
pub use ladder::LadderSystem;
pub use scatter::{scattering_from_state, steady_scattering, two_tone_map, two_tone_point};
pub use spectrum::{emission_spectrum, Spectrum, SpectrumOptions};
pub use steady::steady_state;
