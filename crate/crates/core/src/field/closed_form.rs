//! Fresnel-approximation closed forms for depth and cross-range gain.

use super::FocalSpec;
use crate::error::{Error, Result};
use crate::geometry::{CarrierSpec, MlaSpec};
use crate::numerics::{fresnel_integrals, normalized_sinc};
use num_complex::Complex64;

/// Cross-range half-power width constant: `sinc²(0.885/2) = 1/2`, doubled.
const BW_CONSTANT: f64 = 1.77;

/// Default depth for which a local minimum of the depth curve counts as a null.
pub const DEFAULT_NULL_THRESHOLD: f64 = 0.05;

/// `z_eff = F z / |F - z|` and `a = λ / (8 z_eff)`.
///
/// At `z = F` the effective distance is infinite and `a = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveDistance {
    pub z_eff: f64,
    pub a: f64,
}

impl EffectiveDistance {
    pub fn new(focal: &FocalSpec, z: f64, carrier: &CarrierSpec) -> Self {
        let f = focal.distance();
        let z_eff = if focal.is_infinite() {
            z
        } else if (f - z).abs() <= 1e-12 * f {
            f64::INFINITY
        } else {
            f * z / (f - z).abs()
        };
        Self {
            z_eff,
            a: carrier.wavelength() / (8.0 * z_eff),
        }
    }

    #[inline]
    pub fn is_focal(&self) -> bool {
        self.z_eff.is_infinite()
    }

    /// Scale from metres on the aperture to Fresnel-integral argument.
    #[inline]
    fn scale(&self, carrier: &CarrierSpec) -> f64 {
        (2.0 / (carrier.wavelength() * self.z_eff)).sqrt()
    }
}

#[inline]
fn fc(u: f64) -> Complex64 {
    fresnel_integrals(u).complex()
}

/// Closed-form depth gain of an `N`-element ULA with spacing `delta`.
pub fn gain_ula_fresnel(
    n: usize,
    delta: f64,
    focal: &FocalSpec,
    z: f64,
    carrier: &CarrierSpec,
) -> f64 {
    let eff = EffectiveDistance::new(focal, z, carrier);
    if eff.is_focal() {
        return 1.0;
    }
    let u0 = 0.5 * delta * eff.scale(carrier);
    let nu = n as f64 * u0;
    let num = fc(u0).norm_sqr() * fc(nu).norm_sqr();
    let den = (n as f64 * u0 * u0).powi(2);
    num / den
}

/// Closed-form depth gain of an MLA.
///
/// Each sub-array centred at `c` contributes `𝓕(N u₀ + s c) + 𝓕(N u₀ − s c)`
/// with `𝓕 = C + iS`; for even `L` pairing `±c` gives the usual sum over odd
/// multiples of Δ̄.
pub fn gain_mla_fresnel(mla: &MlaSpec, focal: &FocalSpec, z: f64, carrier: &CarrierSpec) -> f64 {
    let eff = EffectiveDistance::new(focal, z, carrier);
    if eff.is_focal() {
        return 1.0;
    }
    let s = eff.scale(carrier);
    let u0 = 0.5 * mla.delta() * s;
    let nu = mla.antennas() as f64 * u0;
    let total: Complex64 = mla
        .subarray_centers()
        .iter()
        .map(|&c| fc(nu + s * c) + fc(nu - s * c))
        .sum();
    let ln = mla.total_antennas() as f64;
    fc(u0).norm_sqr() * total.norm_sqr() / (2.0 * ln * u0 * u0).powi(2)
}

/// Cross-range gain at the focal depth and its sub-array envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRangeGain {
    pub gain: f64,
    pub envelope: f64,
}

/// Closed-form cross-range gain at `(x_t, 0, F)`.
pub fn crossrange_gain(
    mla: &MlaSpec,
    focal: &FocalSpec,
    x_t: f64,
    carrier: &CarrierSpec,
) -> CrossRangeGain {
    let lf = carrier.wavelength() * focal.distance();
    let n = mla.antennas() as f64;
    let envelope = normalized_sinc(n * mla.delta() * x_t / lf).powi(2);
    let l = mla.subarrays() as f64;
    let array: f64 = mla
        .subarray_centers()
        .iter()
        .map(|&c| (2.0 * std::f64::consts::PI * c * x_t / lf).cos())
        .sum::<f64>()
        / l;
    CrossRangeGain {
        gain: envelope * array * array,
        envelope,
    }
}

/// Half-power cross-range beamwidth; `1.77 F / N` at half-wavelength spacing.
pub fn half_power_beamwidth(n: usize, delta: f64, focal: &FocalSpec, carrier: &CarrierSpec) -> f64 {
    BW_CONSTANT * focal.distance() / n as f64 * carrier.wavelength() / (2.0 * delta)
}

/// Predicted cosine ripple inside the half-power window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RippleMetrics {
    /// Half beamwidth divided by the cosine lobe spacing `λF / (2Δ̄)`.
    pub ratio: f64,
    pub predicted_peak_count: usize,
    pub single_peak: bool,
    /// `Nλ / D`: a single sub-array's share of the aperture in wavelengths.
    pub ula_fraction: f64,
}

pub fn ripple_metrics(
    n: usize,
    delta: f64,
    delta_bar: f64,
    aperture: f64,
    carrier: &CarrierSpec,
) -> RippleMetrics {
    let lambda = carrier.wavelength();
    // F cancels; evaluate at F = 1.
    let half_bw = 0.5 * BW_CONSTANT / n as f64 * lambda / (2.0 * delta);
    let ratio = half_bw / (lambda / (2.0 * delta_bar));
    RippleMetrics {
        ratio,
        predicted_peak_count: 2 * ratio.floor() as usize + 1,
        single_peak: ratio < 1.0,
        ula_fraction: n as f64 * lambda / aperture,
    }
}

const NULL_SEARCH_SPAN: f64 = 100.0;
const NULL_GRID_POINTS: usize = 20_000;
const NULL_TOLERANCE: f64 = 1e-4;

/// First depth `z > F` at which the closed-form depth gain has a local
/// minimum below `threshold`.
pub fn first_null_after_focus(
    mla: &MlaSpec,
    focal: &FocalSpec,
    carrier: &CarrierSpec,
    threshold: f64,
) -> Result<f64> {
    if focal.is_infinite() {
        return Err(Error::NotFound("a plane-wave beam has no depth null".into()));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid("null_threshold", "must lie in (0, 1)"));
    }
    let f = focal.distance();
    let g = |z: f64| gain_mla_fresnel(mla, focal, z, carrier);
    let start = f * (1.0 + 1e-4);
    let ratio = (NULL_SEARCH_SPAN * f / start).powf(1.0 / (NULL_GRID_POINTS - 1) as f64);
    let mut z_prev = start;
    let mut g_prev = g(z_prev);
    let mut z_cur = start * ratio;
    let mut g_cur = g(z_cur);
    for _ in 2..NULL_GRID_POINTS {
        let z_next = z_cur * ratio;
        let g_next = g(z_next);
        if g_cur < g_prev && g_cur <= g_next && g_cur < threshold {
            let z = golden_min(&g, z_prev, z_next, NULL_TOLERANCE);
            return Ok(z);
        }
        z_prev = z_cur;
        g_prev = g_cur;
        z_cur = z_next;
        g_cur = g_next;
    }
    Err(Error::NotFound(format!(
        "no depth null below {threshold} between {f} m and {} m",
        NULL_SEARCH_SPAN * f
    )))
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ApertureConvention;

    fn lam() -> CarrierSpec {
        CarrierSpec::from_wavelength(0.02).unwrap()
    }

    fn focal(f: f64) -> FocalSpec {
        FocalSpec::new(f).unwrap()
    }

    /// Even-L form written with the explicit odd-k sum.
    fn odd_multiple_oracle(l: usize, n: usize, delta: f64, delta_bar: f64, f: f64, z: f64, lambda: f64) -> f64 {
        let ze = f * z / (f - z).abs();
        let s = (2.0 / (lambda * ze)).sqrt();
        let u0 = delta / 2.0 * s;
        let nu = n as f64 * u0;
        let mut tot = Complex64::new(0.0, 0.0);
        for k in (1..l).step_by(2) {
            let b = s * k as f64 * delta_bar;
            tot += fc(nu + b) + fc(nu - b);
        }
        fc(u0).norm_sqr() * tot.norm_sqr() / ((l * n) as f64 * u0 * u0).powi(2)
    }

    #[test]
    fn focal_limit_is_one() {
        let c = lam();
        assert_eq!(gain_ula_fresnel(50, 0.01, &focal(30.0), 30.0, &c), 1.0);
        for eps in [1e-3, 1e-5, 1e-7] {
            let g = gain_ula_fresnel(50, 0.01, &focal(30.0), 30.0 + eps, &c);
            assert!((1.0 - g) < 1e-6, "{eps}: {g}");
        }
    }

    #[test]
    fn depends_only_on_effective_distance() {
        let c = lam();
        // F z / |F - z| = 20 for (F, z) = (30, 12) and (60, 15).
        let a = gain_ula_fresnel(64, 0.01, &focal(30.0), 12.0, &c);
        let b = gain_ula_fresnel(64, 0.01, &focal(60.0), 15.0, &c);
        assert!((a - b).abs() < 1e-12);
        let mla = MlaSpec::new(2, 64, 0.01, 0.72).unwrap();
        let a = gain_mla_fresnel(&mla, &focal(30.0), 12.0, &c);
        let b = gain_mla_fresnel(&mla, &focal(60.0), 15.0, &c);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn mla_matches_odd_k_sum() {
        let c = lam();
        for &(l, n, gap) in &[(2, 64, 0.72), (4, 16, 0.13), (8, 4, 0.2)] {
            let mla = MlaSpec::new(l, n, 0.01, gap).unwrap();
            for &z in &[3.0, 10.0, 27.0, 45.0, 90.0] {
                let got = gain_mla_fresnel(&mla, &focal(30.0), z, &c);
                let want = odd_multiple_oracle(l, n, 0.01, mla.delta_bar(), 30.0, z, 0.02);
                assert!((got - want).abs() < 1e-12, "{l} {n} {z}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn single_subarray_reduces_to_ula() {
        let c = lam();
        let mla = MlaSpec::ula(40, 0.01).unwrap();
        for &z in &[5.0, 20.0, 60.0] {
            let a = gain_mla_fresnel(&mla, &focal(30.0), z, &c);
            let b = gain_ula_fresnel(40, 0.01, &focal(30.0), z, &c);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn contiguous_pair_is_double_ula() {
        let c = lam();
        let mla = MlaSpec::new(2, 32, 0.01, 0.01).unwrap();
        for &z in &[4.0, 17.0, 33.0, 80.0] {
            let a = gain_mla_fresnel(&mla, &focal(30.0), z, &c);
            let b = gain_ula_fresnel(64, 0.01, &focal(30.0), z, &c);
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn crossrange_at_zero_and_cosine_null() {
        let c = lam();
        let mla = MlaSpec::new(2, 64, 0.01, 0.72).unwrap();
        let f = focal(30.0);
        let g = crossrange_gain(&mla, &f, 0.0, &c);
        assert_eq!((g.gain, g.envelope), (1.0, 1.0));
        let x = 0.02 * 30.0 / (4.0 * mla.delta_bar());
        let g = crossrange_gain(&mla, &f, x, &c);
        assert!(g.gain < 1e-20);
        assert!(g.envelope > 0.0);
    }

    #[test]
    fn envelope_half_power_edge() {
        let c = lam();
        let mla = MlaSpec::new(2, 64, 0.01, 0.72).unwrap();
        let f = focal(30.0);
        for sign in [-1.0, 1.0] {
            let g = crossrange_gain(&mla, &f, sign * 0.885 * 30.0 / 64.0, &c);
            assert!((g.envelope - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn beamwidths() {
        let c = lam();
        let f = focal(30.0);
        assert!((half_power_beamwidth(64, 0.01, &f, &c) - 0.8296875).abs() < 1e-12);
        assert!((half_power_beamwidth(16, 0.01, &f, &c) - 3.31875).abs() < 1e-12);
    }

    #[test]
    fn ripple_examples() {
        let c = lam();
        let conv = ApertureConvention::SubarrayLengths;
        let big = MlaSpec::from_aperture(2, 64, 0.01, 2.0, conv).unwrap();
        let m = ripple_metrics(64, 0.01, big.delta_bar(), 2.0, &c);
        assert!(m.single_peak);
        assert_eq!(m.predicted_peak_count, 1);
        assert!((m.ula_fraction - 0.64).abs() < 1e-12);
        let small = MlaSpec::from_aperture(2, 16, 0.01, 2.0, conv).unwrap();
        let m = ripple_metrics(16, 0.01, small.delta_bar(), 2.0, &c);
        assert_eq!(m.predicted_peak_count, 11);
        assert!(!m.single_peak);
        assert_eq!(ripple_metrics(16, 0.01, 0.0, 2.0, &c).predicted_peak_count, 1);
    }

    #[test]
    fn first_null_is_a_local_minimum() {
        let c = lam();
        let mla = MlaSpec::from_aperture(4, 16, 0.01, 1.0, ApertureConvention::SubarrayLengths).unwrap();
        let f = focal(2.0);
        let z = first_null_after_focus(&mla, &f, &c, DEFAULT_NULL_THRESHOLD).unwrap();
        assert!((z - 2.74).abs() < 0.05, "{z}");
        let g = |z| gain_mla_fresnel(&mla, &f, z, &c);
        assert!(g(z) < DEFAULT_NULL_THRESHOLD);
        assert!(g(z + 0.01) > g(z));
        assert!(g(z - 0.01) > g(z));
    }

    #[test]
    fn no_null_beyond_fraunhofer() {
        let c = lam();
        let mla = MlaSpec::from_aperture(4, 16, 0.01, 1.0, ApertureConvention::SubarrayLengths).unwrap();
        let err = first_null_after_focus(&mla, &focal(200.0), &c, DEFAULT_NULL_THRESHOLD);
        assert!(matches!(err, Err(Error::NotFound(_))));
        let err = first_null_after_focus(&mla, &FocalSpec::infinite(), &c, DEFAULT_NULL_THRESHOLD);
        assert!(matches!(err, Err(Error::NotFound(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn gains_bounded(l in 1usize..9, n in 1usize..65, gap in 0.01f64..1.0, f in 2.0f64..80.0, z in 0.5f64..300.0) {
                let c = lam();
                let mla = MlaSpec::new(l, n, 0.01, gap).unwrap();
                let g = gain_mla_fresnel(&mla, &focal(f), z, &c);
                prop_assert!((0.0..=1.0 + 1e-9).contains(&g));
                let g = gain_ula_fresnel(n, 0.01, &focal(f), z, &c);
                prop_assert!((0.0..=1.0 + 1e-9).contains(&g));
            }

            #[test]
            fn crossrange_symmetric_and_under_envelope(l in 1usize..9, n in 1usize..65, gap in 0.01f64..1.0, x in -5.0f64..5.0) {
                let c = lam();
                let mla = MlaSpec::new(l, n, 0.01, gap).unwrap();
                let f = focal(30.0);
                let a = crossrange_gain(&mla, &f, x, &c);
                let b = crossrange_gain(&mla, &f, -x, &c);
                prop_assert_eq!(a.gain, b.gain);
                prop_assert!(a.gain <= a.envelope + 1e-12);
                prop_assert!((0.0..=1.0).contains(&a.envelope));
            }
        }
    }
}
