use crate::error::{Error, Result};

/// Estimated user position in Cartesian and polar form about the array centre.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionEstimate {
    pub x: f64,
    pub z: f64,
    pub distance: f64,
    pub angle: f64,
}

impl PositionEstimate {
    pub fn from_cartesian(x: f64, z: f64) -> Self {
        Self {
            x,
            z,
            distance: x.hypot(z),
            angle: z.atan2(x),
        }
    }
}

const MAX_CONDITION: f64 = 1e12;

/// Intersects the bearing lines `z = (x − cₗ) tan φₗ` in the least-squares sense.
///
/// Solves the normal equations of the rows `[tan φₗ, −1]·[x, z]ᵀ = cₗ tan φₗ`
/// with `ridge·I` added.
pub fn triangulate(angles: &[f64], centers: &[f64], ridge: f64) -> Result<PositionEstimate> {
    if angles.len() != centers.len() {
        return Err(Error::invalid("angles", "need one angle per sub-array centre"));
    }
    if angles.len() < 2 {
        return Err(Error::invalid("angles", "triangulation needs at least two bearings"));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::invalid("ridge", "must be non-negative"));
    }
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&phi, &c) in angles.iter().zip(centers) {
        let t = phi.tan();
        let rhs = c * t;
        a11 += t * t;
        a12 -= t;
        a22 += 1.0;
        b1 += t * rhs;
        b2 -= rhs;
    }
    a11 += ridge;
    a22 += ridge;
    let mean = 0.5 * (a11 + a22);
    let spread = (0.25 * (a11 - a22).powi(2) + a12 * a12).sqrt();
    let (hi, lo) = (mean + spread, mean - spread);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if ridge == 0.0 && condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let det = a11 * a22 - a12 * a12;
    let x = (a22 * b1 - a12 * b2) / det;
    let z = (a11 * b2 - a12 * b1) / det;
    Ok(PositionEstimate::from_cartesian(x, z))
}

/// `Σ ‖x̂ − x‖² / Σ ‖x‖²` over paired estimates and truths `(x, z)`.
pub fn nmse(estimates: &[(f64, f64)], truths: &[(f64, f64)]) -> Result<f64> {
    if estimates.len() != truths.len() || estimates.is_empty() {
        return Err(Error::invalid("estimates", "need equal-length, non-empty lists"));
    }
    let err: f64 = estimates
        .iter()
        .zip(truths)
        .map(|(e, t)| (e.0 - t.0).powi(2) + (e.1 - t.1).powi(2))
        .sum();
    let norm: f64 = truths.iter().map(|t| t.0 * t.0 + t.1 * t.1).sum();
    Ok(err / norm)
}
