//! Monotone piecewise cubic Hermite (Fritsch–Carlson) resampling.

/// Resamples uniformly spaced `samples` onto a grid `factor` times denser.
///
/// The output has `(n - 1) * factor + 1` points and passes through every
/// input sample. Between samples the interpolant is monotone wherever the
/// data are, so no overshoot lobes are introduced.
pub fn pchip_resample(samples: &[f64], factor: usize) -> Vec<f64> {
    let n = samples.len();
    if n < 2 || factor <= 1 {
        return samples.to_vec();
    }
    let d = slopes(samples);
    let mut out = Vec::with_capacity((n - 1) * factor + 1);
    for k in 0..n - 1 {
        let (y0, y1) = (samples[k], samples[k + 1]);
        let (m0, m1) = (d[k], d[k + 1]);
        // Power form keeps flat segments exactly flat.
        let c2 = 3.0 * (y1 - y0) - 2.0 * m0 - m1;
        let c3 = 2.0 * (y0 - y1) + m0 + m1;
        for j in 0..factor {
            let t = j as f64 / factor as f64;
            out.push(y0 + t * (m0 + t * (c2 + t * c3)));
        }
    }
    out.push(samples[n - 1]);
    out
}

/// Node derivatives in units of "per sample step".
fn slopes(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let delta: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a * b > 0.0 {
            // Harmonic mean; equal-weight form of Fritsch–Butland on a uniform grid.
            d[k] = 2.0 / (1.0 / a + 1.0 / b);
        }
    }
    d[0] = end_slope(delta[0], delta[1]);
    d[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
    d
}

/// Shape-preserving three-point end condition.
fn end_slope(d0: f64, d1: f64) -> f64 {
    let m = (3.0 * d0 - d1) / 2.0;
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
