//! Channel reconstruction from a location estimate and link spectral efficiency.

use crate::error::{Error, Result};
use crate::geometry::{CarrierSpec, MlaSpec};
use crate::localization::near_steering;
use nalgebra::DVector;
use num_complex::Complex64;

/// Free-space gain `(λ / 4πd)²`.
pub fn friis_beta(carrier: &CarrierSpec, distance: f64) -> f64 {
    let r = carrier.wavelength() / (4.0 * std::f64::consts::PI * distance);
    r * r
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Array response and large-scale gain rebuilt from a location.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub response: DVector<Complex64>,
    pub beta: f64,
    pub angle: f64,
    pub distance: f64,
}

pub fn estimate_channel(
    angle: f64,
    distance: f64,
    mla: &MlaSpec,
    carrier: &CarrierSpec,
) -> Result<ChannelEstimate> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::invalid("distance", "must be positive"));
    }
    Ok(ChannelEstimate {
        response: near_steering(mla, angle, distance, carrier),
        beta: friis_beta(carrier, distance),
        angle,
        distance,
    })
}

/// `log₂(1 + (Pβ/σ²) |ĥᴴh|² / ‖ĥ‖²)`: combining with `ĥ` over the true channel `h`.
pub fn spectral_efficiency(
    h_true: &DVector<Complex64>,
    h_est: &DVector<Complex64>,
    power: f64,
    beta: f64,
    noise: f64,
) -> Result<f64> {
    let norm2 = h_est.norm_squared();
    if norm2 <= 0.0 {
        return Err(Error::invalid("h_est", "combiner must be non-zero"));
    }
    if h_true.len() != h_est.len() {
        return Err(Error::invalid("h_est", "length must match the true channel"));
    }
    if !(noise > 0.0) {
        return Err(Error::invalid("noise", "must be positive"));
    }
    let gain = h_est.dotc(h_true).norm_sqr() / norm2;
    Ok((1.0 + power * beta / noise * gain).log2())
}
