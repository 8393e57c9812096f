//! Activation-aware RIS beamforming.
//!
//! A reconfigurable intelligent surface whose element spacing is fixed at
//! fabrication sees a different spacing-to-wavelength ratio at each operating
//! band. This crate co-phases the surface towards a target user and then picks
//! a binary activation profile that maximizes the signal-to-leakage-plus-noise
//! ratio (SLNR), using a semidefinite relaxation solved by bisection and
//! Gaussian randomization.
//!
//! The layers build on each other:
//!
//! - [`array`]: geometry, bands, steering vectors and RIS profiles
//! - [`channel`]: line-of-sight channel synthesis
//! - [`slnr`]: the objective, closed-form phases and the lifted problem
//! - [`sdp`]: PSD projection, level solver, bisection and randomization
//! - [`optimizer`]: the full pipeline plus oracle and baseline
//! - [`beampattern`]: array-factor patterns and lobe metrics
//! - [`sim`]: Monte Carlo over non-intended user placements
//! - [`config`] and [`commands`]: the file formats and command-line front end

pub mod array;
pub mod beampattern;
pub mod channel;
pub mod commands;
pub mod config;
pub mod error;
pub mod instances;
pub mod optimizer;
pub mod sdp;
pub mod sim;
pub mod slnr;

pub use error::{Error, Result};
