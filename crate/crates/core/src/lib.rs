//! Near-field beamfocusing with modular linear arrays.
//!
//! The crate covers the whole modelling chain for a line of identical
//! uniform sub-arrays: exact and Fresnel-approximated matched-filter gains,
//! beamwidth and ripple analysis, the choice of sub-array count for a given
//! aperture, and a localization pipeline (per-sub-array MUSIC fused by
//! least-squares triangulation) whose location estimate is turned into a
//! channel estimate and scored by spectral efficiency.

pub mod channel;
pub mod design;
pub mod error;
pub mod experiments;
pub mod field;
pub mod geometry;
pub mod localization;
pub mod numerics;
mod seed;

pub use error::{Error, Result};
pub use geometry::{ApertureConvention, ArrayMetrics, CarrierSpec, MlaSpec};
pub use seed::derive_seed;
