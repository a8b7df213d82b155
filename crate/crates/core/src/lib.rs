//! Forced Korteweg–de Vries model of a solitary Kelvin wave travelling
//! around a precessing annular channel.
//!
//! The pipeline runs from a [`scenario::Scenario`] (geometry, fill volume,
//! operating point) through the derived scales and the KdV coefficients to
//! an explicit finite-difference integration on the azimuthal ring.
//! [`analytic`] holds the closed-form comparison profiles, [`diagnostics`]
//! the flow-regime numbers, and [`cli_io`] the file formats and run
//! orchestration behind the `kelvin-kdv` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli_io;
pub mod coefficients;
pub mod diagnostics;
pub mod scenario;
pub mod solver;

pub use coefficients::{
    compute_coefficients, dispersion_relation, theoretical_wave_speed, KdvCoefficients,
};
pub use scenario::{
    derive_scales, ChannelGeometry, DerivedScales, EpsilonMode, FluidProperties, LabCase, Scenario,
};
pub use solver::{simulate, step, ForcingMode, RingGrid, StepParams, WaveState};
