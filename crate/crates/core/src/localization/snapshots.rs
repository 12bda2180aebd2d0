use super::steering::{far_steering, near_steering, subarray_offsets};
use crate::channel::friis_beta;
use crate::error::{Error, Result};
use crate::geometry::{CarrierSpec, MlaSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

/// How the received wavefront is modelled across the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignalModel {
    /// Each sub-array sees a plane wave from its own angle to the user,
    /// phase-referenced to the propagation delay to its centre.
    #[default]
    PiecewiseFarField,
    /// Exact spherical wavefront over the whole array.
    NearField,
}

/// One user, one array, one noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub mla: MlaSpec,
    pub carrier: CarrierSpec,
    /// Distance from the array centre, metres.
    pub distance: f64,
    /// Angle from the positive x-axis, radians.
    pub angle: f64,
    /// Transmit power, watts.
    pub power: f64,
    /// Noise power per antenna, watts.
    pub noise: f64,
    pub snapshots: usize,
    pub model: SignalModel,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(Error::invalid("distance", "must be positive"));
        }
        if !(self.angle > 0.0 && self.angle < std::f64::consts::PI) {
            return Err(Error::invalid("angle", "must lie in (0, π)"));
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::invalid("power", "must be positive"));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::invalid("noise", "must be non-negative"));
        }
        if self.snapshots == 0 {
            return Err(Error::invalid("snapshots", "need at least one snapshot"));
        }
        if self.mla.antennas() < 2 {
            return Err(Error::invalid("antennas", "MUSIC needs at least two antennas per sub-array"));
        }
        Ok(())
    }

    /// User position `(x, z)`.
    pub fn position(&self) -> (f64, f64) {
        (self.distance * self.angle.cos(), self.distance * self.angle.sin())
    }

    /// Angle from the centre of sub-array `l` to the user.
    pub fn subarray_angle(&self, l: usize) -> f64 {
        let (x, z) = self.position();
        z.atan2(x - self.mla.subarray_center(l))
    }

    pub fn subarray_distance(&self, l: usize) -> f64 {
        let (x, z) = self.position();
        (x - self.mla.subarray_center(l)).hypot(z)
    }
}

/// Received snapshots, one `N × T` matrix (column per snapshot) per sub-array.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    pub scenario: Scenario,
    pub seed: u64,
    pub subarrays: Vec<DMatrix<Complex64>>,
}

impl SnapshotSet {
    /// Whole-array `L·N × T` matrix.
    pub fn stacked(&self) -> DMatrix<Complex64> {
        let n = self.scenario.mla.antennas();
        let t = self.scenario.snapshots;
        let mut out = DMatrix::zeros(self.subarrays.len() * n, t);
        for (l, y) in self.subarrays.iter().enumerate() {
            out.view_mut((l * n, 0), (n, t)).copy_from(y);
        }
        out
    }
}

fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Draws `T` snapshots of a unit-power Gaussian symbol plus white noise.
pub fn synthesize_snapshots(scenario: &Scenario, seed: u64) -> Result<SnapshotSet> {
    scenario.validate()?;
    let mla = &scenario.mla;
    let carrier = &scenario.carrier;
    let n = mla.antennas();
    let t = scenario.snapshots;
    let amp = (scenario.power * friis_beta(carrier, scenario.distance)).sqrt();
    let k = carrier.wavenumber();
    let offsets = subarray_offsets(mla);
    let full = match scenario.model {
        SignalModel::NearField => Some(near_steering(mla, scenario.angle, scenario.distance, carrier)),
        SignalModel::PiecewiseFarField => None,
    };
    let responses: Vec<Vec<Complex64>> = (0..mla.subarrays())
        .map(|l| match &full {
            Some(b) => b.rows(l * n, n).iter().map(|v| amp * v).collect(),
            None => {
                let delay = Complex64::from_polar(amp, -k * scenario.subarray_distance(l));
                far_steering(&offsets, scenario.subarray_angle(l), carrier)
                    .iter()
                    .map(|v| delay * v)
                    .collect()
            }
        })
        .collect();

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let symbols: Vec<Complex64> = (0..t).map(|_| complex_normal(&mut rng)).collect();
    let sigma = scenario.noise.sqrt();
    let subarrays = responses
        .iter()
        .map(|resp| {
            let mut y = DMatrix::from_fn(n, t, |i, j| resp[i] * symbols[j]);
            for j in 0..t {
                for i in 0..n {
                    y[(i, j)] += sigma * complex_normal(&mut rng);
                }
            }
            y
        })
        .collect();
    Ok(SnapshotSet {
        scenario: scenario.clone(),
        seed,
        subarrays,
    })
}
