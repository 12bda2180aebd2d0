//! Exact Green-function field and matched-filter gain.

use super::{FocalSpec, TxPoint};
use crate::geometry::{CarrierSpec, MlaSpec};
use crate::numerics::{integrate_cell, Cell, QuadratureRule};
use num_complex::Complex64;

const INV_SQRT_4PI: f64 = 0.282_094_791_773_878_14;

/// Radiated field at `(x, y, 0)` from a transmitter at `tx`, unit source amplitude.
pub fn exact_field(tx: &TxPoint, x: f64, y: f64, carrier: &CarrierSpec) -> Complex64 {
    let dx = x - tx.x;
    let dy = y - tx.y;
    let z = tx.z;
    let r2 = dx * dx + dy * dy + z * z;
    let dist = r2.sqrt();
    let amp = INV_SQRT_4PI * (z * (dx * dx + z * z)).sqrt() / (r2 * dist.sqrt());
    Complex64::from_polar(amp, -carrier.wavenumber() * dist)
}

fn element_cell(x: f64, delta: f64) -> Cell {
    Cell::square(x, 0.0, delta)
}

/// Channel of the `delta × delta` cell centred on element `(l, n)`.
pub fn cell_channel(
    tx: &TxPoint,
    l: usize,
    n: usize,
    mla: &MlaSpec,
    carrier: &CarrierSpec,
    rule: &QuadratureRule,
) -> Complex64 {
    let x = mla.subarray_positions(l)[n];
    channel_at(tx, x, mla.delta(), carrier, rule)
}

fn channel_at(
    tx: &TxPoint,
    x: f64,
    delta: f64,
    carrier: &CarrierSpec,
    rule: &QuadratureRule,
) -> Complex64 {
    integrate_cell(rule, &element_cell(x, delta), |px, py| {
        exact_field(tx, px, py, carrier)
    }) / delta
}

/// Matched-filter weights focused on `(0, 0, F)` with the quadratic
/// (Fresnel) focal phase, normalized to unit energy.
pub fn mf_weights(
    mla: &MlaSpec,
    focal: &FocalSpec,
    carrier: &CarrierSpec,
    rule: &QuadratureRule,
) -> Vec<Complex64> {
    let positions = mla.element_positions();
    if focal.is_infinite() {
        let w = 1.0 / (positions.len() as f64).sqrt();
        return vec![Complex64::new(w, 0.0); positions.len()];
    }
    let k = carrier.wavenumber();
    let f = focal.distance();
    let mut w: Vec<Complex64> = positions
        .iter()
        .map(|&x| {
            integrate_cell(rule, &element_cell(x, mla.delta()), |px, py| {
                Complex64::from_polar(1.0, -k * (px * px + py * py) / (2.0 * f))
            })
            .conj()
        })
        .collect();
    let norm = w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for v in &mut w {
        *v /= norm;
    }
    w
}

/// Exact normalized gain evaluator with precomputed weights.
#[derive(Debug, Clone)]
pub struct ExactGain {
    positions: Vec<f64>,
    weights: Vec<Complex64>,
    delta: f64,
    carrier: CarrierSpec,
    rule: QuadratureRule,
}

impl ExactGain {
    pub fn new(mla: &MlaSpec, focal: &FocalSpec, carrier: &CarrierSpec, rule: QuadratureRule) -> Self {
        Self {
            positions: mla.element_positions(),
            weights: mf_weights(mla, focal, carrier, &rule),
            delta: mla.delta(),
            carrier: *carrier,
            rule,
        }
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// `|Σ w h|²` over the reference SNR of `L·N` origin cells.
    ///
    /// Not clamped: close to the array and off axis the discrete array can
    /// collect slightly more than the origin-cell reference.
    pub fn gain(&self, tx: &TxPoint) -> f64 {
        let combined: Complex64 = self
            .positions
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| w * channel_at(tx, x, self.delta, &self.carrier, &self.rule))
            .sum();
        let reference = integrate_cell(&self.rule, &element_cell(0.0, self.delta), |px, py| {
            Complex64::new(exact_field(tx, px, py, &self.carrier).norm_sqr(), 0.0)
        })
        .re;
        combined.norm_sqr() / (self.positions.len() as f64 * reference)
    }
}

/// One-shot exact gain; prefer [`ExactGain`] for sweeps.
pub fn gain_exact(
    mla: &MlaSpec,
    tx: &TxPoint,
    focal: &FocalSpec,
    carrier: &CarrierSpec,
    rule: &QuadratureRule,
) -> f64 {
    ExactGain::new(mla, focal, carrier, rule.clone()).gain(tx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lam() -> CarrierSpec {
        CarrierSpec::from_wavelength(0.02).unwrap()
    }

    fn gl8() -> QuadratureRule {
        QuadratureRule::gauss_legendre(8).unwrap()
    }

    #[test]
    fn on_axis_field_value() {
        let c = lam();
        let tx = TxPoint::on_axis(30.0).unwrap();
        let e = exact_field(&tx, 0.0, 0.0, &c);
        assert!((e.norm() - 1.0 / ((4.0 * PI).sqrt() * 30.0)).abs() < 1e-15);
        let expected = (-2.0 * PI * 30.0 / 0.02).rem_euclid(2.0 * PI);
        let got = e.arg().rem_euclid(2.0 * PI);
        let diff = (got - expected).abs();
        assert!(diff.min(2.0 * PI - diff) < 1e-9);
    }

    #[test]
    fn field_symmetric_in_x() {
        let c = lam();
        let tx = TxPoint::on_axis(7.0).unwrap();
        assert_eq!(exact_field(&tx, 0.3, 0.01, &c), exact_field(&tx, -0.3, 0.01, &c));
    }

    #[test]
    fn far_phase_matches_fresnel() {
        let c = lam();
        let z = 1000.0;
        let tx = TxPoint::on_axis(z).unwrap();
        let e0 = exact_field(&tx, 0.0, 0.0, &c);
        let e = exact_field(&tx, 0.5, 0.0, &c);
        let rel = (e / e0).arg();
        let fresnel = -c.wavenumber() * 0.25 / (2.0 * z);
        assert!((rel - fresnel).abs() < 1e-3);
    }

    #[test]
    fn far_cell_channel_magnitude() {
        let c = lam();
        let mla = MlaSpec::ula(8, 0.01).unwrap();
        let tx = TxPoint::on_axis(1000.0).unwrap();
        let h = cell_channel(&tx, 0, 3, &mla, &c, &gl8());
        let expected = 0.01 / ((4.0 * PI).sqrt() * 1000.0);
        assert!((h.norm() / expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn mirrored_cells_equal_on_broadside() {
        let c = lam();
        let mla = MlaSpec::new(2, 4, 0.01, 0.3).unwrap();
        let tx = TxPoint::on_axis(5.0).unwrap();
        let a = cell_channel(&tx, 0, 0, &mla, &c, &gl8());
        let b = cell_channel(&tx, 1, 3, &mla, &c, &gl8());
        assert!((a - b).norm() < 1e-15 * a.norm().max(1e-300) + 1e-18);
    }

    #[test]
    fn channel_energy_against_refined_rule() {
        let c = lam();
        let mla = MlaSpec::ula(50, 0.01).unwrap();
        let tx = TxPoint::on_axis(30.0).unwrap();
        let energy = |rule: &QuadratureRule| -> f64 {
            (0..50)
                .map(|n| cell_channel(&tx, 0, n, &mla, &c, rule).norm_sqr())
                .sum()
        };
        let coarse = energy(&gl8());
        let fine = energy(&QuadratureRule::gauss_legendre(32).unwrap());
        assert!((coarse / fine - 1.0).abs() < 1e-8);
    }

    #[test]
    fn plane_wave_weights_equal() {
        let c = lam();
        let mla = MlaSpec::new(2, 3, 0.01, 0.1).unwrap();
        let w = mf_weights(&mla, &FocalSpec::infinite(), &c, &gl8());
        for v in &w {
            assert!((v - Complex64::new(1.0 / 6f64.sqrt(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn focused_weights_unit_energy_and_symmetric() {
        let c = lam();
        let mla = MlaSpec::new(2, 64, 0.01, 0.72).unwrap();
        let w = mf_weights(&mla, &FocalSpec::new(30.0).unwrap(), &c, &gl8());
        let e: f64 = w.iter().map(|v| v.norm_sqr()).sum();
        assert!((e - 1.0).abs() < 1e-12);
        let n = w.len();
        for i in 0..n {
            assert!((w[i] - w[n - 1 - i]).norm() < 1e-14);
        }
    }

    #[test]
    fn focal_gain_close_to_one() {
        let c = lam();
        let mla = MlaSpec::new(2, 64, 0.01, 0.72).unwrap();
        let f = FocalSpec::new(30.0).unwrap();
        let g = gain_exact(&mla, &TxPoint::on_axis(30.0).unwrap(), &f, &c, &gl8());
        assert!((0.95..=1.0 + 1e-9).contains(&g), "{g}");
    }

    #[test]
    fn off_axis_symmetry() {
        let c = lam();
        let mla = MlaSpec::new(2, 16, 0.01, 0.5).unwrap();
        let model = ExactGain::new(&mla, &FocalSpec::new(10.0).unwrap(), &c, gl8());
        let a = model.gain(&TxPoint::new(0.37, 0.0, 10.0).unwrap());
        let b = model.gain(&TxPoint::new(-0.37, 0.0, 10.0).unwrap());
        assert!((a - b).abs() < 1e-9);
    }
}
