//! Slow/fast Navier-Stokes with fractional Ornstein-Uhlenbeck transport noise.
//!
//! The crate is organised around five layers:
//!
//! * [`spectral`]: truncated Fourier fields, Leray projection, Sobolev norms.
//! * [`noise`]: fractional Brownian motion and stationary fOU ensembles.
//! * [`rough`]: level-2 lifts, variation norms, sewing, rough integrals.
//! * [`urd`]: unbounded rough drivers and solution certificates.
//! * [`solver`]: the ε-system stepper and the Davie limit stepper.
//!
//! [`experiment`] wires them into the homogenisation pipelines driven by the
//! `roughflow` binary.

pub mod error;
pub mod experiment;
pub mod noise;
pub mod quad;
pub mod rng;
pub mod rough;
pub mod solver;
pub mod spectral;
pub mod time_grid;
pub mod urd;

pub use error::{Error, Result};
pub use time_grid::TimeGrid;
