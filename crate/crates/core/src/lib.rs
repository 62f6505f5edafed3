//! Simulation and optimization of a compact base station made of one movable
//! antenna (MA) placed in the near field of a transmissive RIS (TRIS).
//!
//! - [`geometry`]: TRIS grid, distances, Rayleigh boundary, MA region.
//! - [`channel`]: spherical-wave link coefficients, cascaded sum, SNR.
//! - [`phase`]: b-bit phase sets, quantization, phase alignment.
//! - [`optimizer`]: SNR gradient, gradient-ascent MA update, alternating loop.
//! - [`baseline`]: conventional MRT array over the direct link.
//! - [`experiments`]: sweep harness with deterministic CSV output.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod optimizer;
pub mod phase;

pub use channel::{Scene, Snr, SystemParams};
pub use error::{Error, Result};
pub use geometry::{MaRegion, MaState, Position3, TrisGeometry};
pub use optimizer::{ao_optimize, AoResult, AoTrace, OptimizerSettings};
pub use phase::{PhaseConfig, PhaseResolution, PhaseSet};
