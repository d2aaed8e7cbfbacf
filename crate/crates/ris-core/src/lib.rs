//! Mutual-coupling-aware modeling of RIS-aided wireless channels.
//!
//! The crate builds the coupling scattering matrix of a reconfigurable
//! intelligent surface from a parameterized thin-dipole model, synthesizes
//! radiation patterns under both the coupling-aware and the conventional
//! (coupling-unaware) channel models, fits the dipole parameters to reference
//! patterns by 2D grid search, and evaluates the coupling-induced loss in
//! achievable rate for a SISO link.
//!
//! Modules follow the processing chain:
//!
//! * [`geometry`] — array layout, directions, feed placement
//! * [`network`] — reflection coefficients, Z/S conversions, the dipole
//!   mutual impedance, and the coupled reflection solve
//! * [`pattern`] — radiation pattern synthesis and side-lobe extraction
//! * [`beamforming`] — continuous phase design and 1-bit quantization
//! * [`fitting`] — dipole parameter estimation against reference patterns
//! * [`rate`] — SISO SNR/achievable-rate evaluation and parameter sweeps

pub mod beamforming;
pub mod error;
pub mod fitting;
pub mod geometry;
pub(crate) mod linalg;
pub mod network;
pub mod pattern;
pub mod quadrature;
pub mod rate;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
