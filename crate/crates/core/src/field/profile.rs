//! Sampled gain profiles: cross-range cuts, depth cuts and xz planes.

use super::closed_form::{crossrange_gain, gain_mla_fresnel};
use super::exact::ExactGain;
use super::{FocalSpec, TxPoint};
use crate::error::{Error, Result};
use crate::geometry::{CarrierSpec, MlaSpec};
use crate::numerics::QuadratureRule;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileAxis {
    CrossRange,
    Depth,
    Plane,
}

/// Sampled normalized gain.
///
/// For [`ProfileAxis::Plane`] the gains are stored row-major with `z` as the
/// outer index: `gain[iz * x.len() + ix]`. Cuts hold a single coordinate on
/// the fixed axis. Gains are clamped to `[0, 1]` for display.
#[derive(Debug, Clone, PartialEq)]
pub struct GainProfile {
    pub axis: ProfileAxis,
    pub focal: FocalSpec,
    pub mla: MlaSpec,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub gain: Vec<f64>,
    /// Sub-array envelope, present for cross-range cuts.
    pub envelope: Option<Vec<f64>>,
}

impl GainProfile {
    pub fn len(&self) -> usize {
        self.gain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gain.is_empty()
    }

    /// `(x, z, gain)` triples in storage order.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let nx = self.x.len();
        self.gain
            .iter()
            .enumerate()
            .map(move |(i, &g)| match self.axis {
                ProfileAxis::CrossRange => (self.x[i], self.z[0], g),
                ProfileAxis::Depth => (self.x[0], self.z[i], g),
                ProfileAxis::Plane => (self.x[i % nx], self.z[i / nx], g),
            })
    }
}

fn check_increasing(name: &'static str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::invalid(name, "grid is empty"));
    }
    if !v.windows(2).all(|w| w[0] < w[1]) || v.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid(name, "grid must be finite and strictly increasing"));
    }
    Ok(())
}

fn clamp(g: f64) -> f64 {
    g.clamp(0.0, 1.0)
}

/// Closed-form cross-range cut at the focal depth.
pub fn crossrange_profile(
    mla: &MlaSpec,
    focal: &FocalSpec,
    carrier: &CarrierSpec,
    xs: &[f64],
) -> Result<GainProfile> {
    check_increasing("x", xs)?;
    let cuts: Vec<_> = xs.iter().map(|&x| crossrange_gain(mla, focal, x, carrier)).collect();
    Ok(GainProfile {
        axis: ProfileAxis::CrossRange,
        focal: *focal,
        mla: mla.clone(),
        x: xs.to_vec(),
        z: vec![focal.distance()],
        gain: cuts.iter().map(|c| clamp(c.gain)).collect(),
        envelope: Some(cuts.iter().map(|c| c.envelope).collect()),
    })
}

/// Which model evaluates a depth cut.
#[derive(Debug, Clone)]
pub enum DepthModel {
    Fresnel,
    Exact(QuadratureRule),
}

/// On-axis depth cut.
pub fn depth_profile(
    mla: &MlaSpec,
    focal: &FocalSpec,
    carrier: &CarrierSpec,
    zs: &[f64],
    model: &DepthModel,
) -> Result<GainProfile> {
    check_increasing("z", zs)?;
    if zs[0] <= 0.0 {
        return Err(Error::invalid("z", "depths must be positive"));
    }
    let gain = match model {
        DepthModel::Fresnel => zs
            .iter()
            .map(|&z| clamp(gain_mla_fresnel(mla, focal, z, carrier)))
            .collect(),
        DepthModel::Exact(rule) => {
            let eval = ExactGain::new(mla, focal, carrier, rule.clone());
            zs.par_iter()
                .map(|&z| clamp(eval.gain(&TxPoint { x: 0.0, y: 0.0, z })))
                .collect()
        }
    };
    Ok(GainProfile {
        axis: ProfileAxis::Depth,
        focal: *focal,
        mla: mla.clone(),
        x: vec![0.0],
        z: zs.to_vec(),
        gain,
        envelope: None,
    })
}

/// Exact gain over an xz grid.
pub fn plane_profile(
    mla: &MlaSpec,
    focal: &FocalSpec,
    carrier: &CarrierSpec,
    xs: &[f64],
    zs: &[f64],
    rule: &QuadratureRule,
) -> Result<GainProfile> {
    check_increasing("x", xs)?;
    check_increasing("z", zs)?;
    if zs[0] <= 0.0 {
        return Err(Error::invalid("z", "depths must be positive"));
    }
    let eval = ExactGain::new(mla, focal, carrier, rule.clone());
    let nx = xs.len();
    let gain = (0..nx * zs.len())
        .into_par_iter()
        .map(|i| {
            let tx = TxPoint {
                x: xs[i % nx],
                y: 0.0,
                z: zs[i / nx],
            };
            clamp(eval.gain(&tx))
        })
        .collect();
    Ok(GainProfile {
        axis: ProfileAxis::Plane,
        focal: *focal,
        mla: mla.clone(),
        x: xs.to_vec(),
        z: zs.to_vec(),
        gain,
        envelope: None,
    })
}
