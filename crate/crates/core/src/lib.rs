//! Simulation and feasibility toolkit for gravitationally induced entanglement
//! between two Stern-Gerlach interferometers.
//!
//! The crate is organised bottom-up:
//!
//! * [`constants`] and [`config`]: physical constants and the experiment
//!   description shared by every other module.
//! * [`gravphase`]: Newtonian branch phases, superposition size, kinematics.
//! * [`spinstate`]: the two-spin state, the spin-correlation witness and the
//!   negativity oracle, dephasing channels.
//! * [`gravfield`]: a mode-discretised linearised-gravity field model that
//!   recovers the branch phases and shows how classicalising the field kills
//!   the entanglement.
//! * [`constraints`] and [`decoherence`]: Casimir-Polder, magnetic and
//!   environmental budgets.
//! * [`sweep`]: grid sweeps and constrained maximisation over the parameter
//!   space.
//! * [`cli`] and [`report`]: the command line surface and its output formats.

// `!(x > 0.0)` is used on purpose so NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod constants;
pub mod constraints;
pub mod decoherence;
pub mod error;
pub mod gravfield;
pub mod gravphase;
pub mod report;
pub mod spinstate;
pub mod sweep;

pub use config::{ExperimentConfig, Validated};
pub use constants::PhysicalConstants;
pub use error::{Error, Result};
