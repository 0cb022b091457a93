//! Single transmon in an open transmission line: closed-form scattering,
//! a three-level ladder master-equation engine, time-domain routing and
//! cascaded multiport networks, plus least-squares parameter extraction.
//!
//! Everything here is a pure function of its inputs and builds without `std`
//! (an allocator is required). IO, configuration and the command line live in
//! the `wqed` crate.
//!
//! Unit convention: every user-facing frequency and rate is cyclic
//! (value/2π) in MHz, transition frequencies are in GHz, powers are in W and
//! times are in ns. Conversion to angular units happens only inside
//! [`engine`].

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod device;
pub mod engine;
pub mod error;
pub mod fitting;
pub mod linalg;
pub mod router;
pub mod scattering;
pub mod units;

pub use device::{Coupling, DeviceParams, DriveTone, Transition};
pub use engine::{DensityMatrix3, LadderSystem, Liouvillian};
pub use error::{Error, Result};
pub use scattering::ScatterResult;
