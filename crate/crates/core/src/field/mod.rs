//! Field model and normalized array gain.
//!
//! Everything here is normalized so that the gain of an ideal continuous
//! matched filter at the focal point is one. The array lies on the x-axis
//! of the plane `z = 0`; transmitters sit at `z > 0`.

mod closed_form;
mod exact;
mod profile;

pub use closed_form::{
    crossrange_gain, first_null_after_focus, gain_mla_fresnel, gain_ula_fresnel,
    half_power_beamwidth, ripple_metrics, CrossRangeGain, EffectiveDistance, RippleMetrics,
    DEFAULT_NULL_THRESHOLD,
};
pub use exact::{cell_channel, exact_field, gain_exact, mf_weights, ExactGain};
pub use profile::{
    crossrange_profile, depth_profile, plane_profile, DepthModel, GainProfile, ProfileAxis,
};

use crate::error::{Error, Result};

/// Transmitter position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TxPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid("z", "transmitter must be in front of the array (z > 0)"));
        }
        Ok(Self { x, y, z })
    }

    /// On-axis transmitter at depth `z`.
    pub fn on_axis(z: f64) -> Result<Self> {
        Self::new(0.0, 0.0, z)
    }
}

/// Focal point `(0, 0, F)`. `F = +∞` selects a broadside plane-wave beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalSpec {
    distance: f64,
}

impl FocalSpec {
    pub fn new(distance: f64) -> Result<Self> {
        if distance.is_nan() || distance <= 0.0 {
            return Err(Error::invalid("focus", "focal distance must be positive"));
        }
        Ok(Self { distance })
    }

    pub fn infinite() -> Self {
        Self {
            distance: f64::INFINITY,
        }
    }

    #[inline]
    pub fn distance(&self) -> f64 {
        self.distance
    }

    #[inline]
    pub fn is_infinite(&self) -> bool {
        self.distance.is_infinite()
    }
}
