//! Fresnel integrals `C(u) = ∫₀ᵘ cos(πt²/2) dt`, `S(u) = ∫₀ᵘ sin(πt²/2) dt`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// `C(u)` and `S(u)` evaluated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub c: f64,
    pub s: f64,
}

impl FresnelPair {
    /// `C(u) + i S(u)`.
    #[inline]
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.c, self.s)
    }
}

const SERIES_LIMIT: f64 = 2.5;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 200;

pub fn fresnel_integrals(u: f64) -> FresnelPair {
    let ax = u.abs();
    let pair = if ax <= SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    if u < 0.0 {
        FresnelPair {
            c: -pair.c,
            s: -pair.s,
        }
    } else {
        pair
    }
}

/// Maclaurin series of both integrals, summed in one pass.
fn series(x: f64) -> FresnelPair {
    if x == 0.0 {
        return FresnelPair { c: 0.0, s: 0.0 };
    }
    // term_k = (-1)^? (π/2)^k x^(2k+1) / k!, split by parity between C and S.
    let t = FRAC_PI_2 * x * x;
    let mut c = 0.0;
    let mut s = 0.0;
    let mut fact = x; // x · t^k / k!
    let mut sign = 1.0;
    for k in 0..MAX_ITER {
        let term = fact / (2 * k + 1) as f64;
        if k % 2 == 0 {
            c += sign * term;
        } else {
            s += sign * term;
            sign = -sign;
        }
        if term < EPS * (c.abs() + s.abs()) {
            break;
        }
        fact *= t / (k + 1) as f64;
    }
    FresnelPair { c, s }
}

/// Modified Lentz evaluation of the continued fraction for the complementary
/// error function along the Fresnel diagonal.
fn continued_fraction(x: f64) -> FresnelPair {
    let tiny = 1e-300;
    let pix2 = PI * x * x;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 1..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (a * d + b).inv();
        cc = b + a / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let phase = Complex64::from_polar(1.0, 0.5 * pix2);
    let cs = Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - phase * h);
    FresnelPair { c: cs.re, s: cs.im }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson rule on a fine grid, independent of both branches.
    fn oracle(u: f64) -> (f64, f64) {
        let n = 200_000;
        let h = u / n as f64;
        let mut c = 0.0;
        let mut s = 0.0;
        for i in 0..=n {
            let t = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let arg = FRAC_PI_2 * t * t;
            c += w * arg.cos();
            s += w * arg.sin();
        }
        (c * h / 3.0, s * h / 3.0)
    }

    #[test]
    fn at_zero() {
        let p = fresnel_integrals(0.0);
        assert_eq!((p.c, p.s), (0.0, 0.0));
    }

    #[test]
    fn reference_values() {
        let p = fresnel_integrals(1.0);
        assert!((p.c - 0.7798934003768228).abs() < 1e-12);
        assert!((p.s - 0.4382591473903548).abs() < 1e-12);
        let p = fresnel_integrals(3.0);
        assert!((p.c - 0.6057207892976856).abs() < 1e-12);
        assert!((p.s - 0.496312998967375).abs() < 1e-12);
    }

    #[test]
    fn matches_simpson_oracle() {
        for &u in &[0.1, 0.5, 1.0, 1.7, 2.4, 2.6, 3.3, 4.5, 6.0] {
            let p = fresnel_integrals(u);
            let (c, s) = oracle(u);
            assert!((p.c - c).abs() < 1e-10, "C({u}): {} vs {c}", p.c);
            assert!((p.s - s).abs() < 1e-10, "S({u}): {} vs {s}", p.s);
        }
    }

    #[test]
    fn branches_agree_at_seam() {
        for &u in &[2.3, 2.5, 2.7] {
            let a = series(u);
            let b = continued_fraction(u);
            assert!((a.c - b.c).abs() < 1e-11, "{u}");
            assert!((a.s - b.s).abs() < 1e-11, "{u}");
        }
    }

    #[test]
    fn large_argument_limit() {
        let p = fresnel_integrals(50.0);
        assert!((p.c - 0.5).abs() < 0.01);
        assert!((p.s - 0.5).abs() < 0.01);
        let p = fresnel_integrals(1e6);
        assert!((p.c - 0.5).abs() < 1e-6);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn odd_symmetry(u in -20.0f64..20.0) {
                let p = fresnel_integrals(u);
                let m = fresnel_integrals(-u);
                prop_assert_eq!(p.c, -m.c);
                prop_assert_eq!(p.s, -m.s);
            }

            #[test]
            fn bounded_for_positive_argument(u in 0.0f64..100.0) {
                let p = fresnel_integrals(u);
                prop_assert!((0.0..=0.9).contains(&p.c));
                prop_assert!((0.0..=0.9).contains(&p.s));
            }

            #[test]
            fn derivative_is_integrand(u in 0.05f64..8.0) {
                let h = 1e-5;
                let dc = (fresnel_integrals(u + h).c - fresnel_integrals(u - h).c) / (2.0 * h);
                let ds = (fresnel_integrals(u + h).s - fresnel_integrals(u - h).s) / (2.0 * h);
                prop_assert!((dc - (FRAC_PI_2 * u * u).cos()).abs() < 1e-6);
                prop_assert!((ds - (FRAC_PI_2 * u * u).sin()).abs() < 1e-6);
            }
        }
    }
}
