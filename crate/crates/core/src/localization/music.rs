use super::steering::far_steering;
use crate::error::{Error, Result};
use crate::geometry::{CarrierSpec, MlaSpec};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

const DENOMINATOR_FLOOR: f64 = f64::MIN_POSITIVE;
const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// `(1/T) Y Yᴴ`, with the lower triangle mirrored so the result is exactly Hermitian.
pub fn sample_covariance(y: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let t = y.ncols().max(1) as f64;
    let mut r = y * y.adjoint() / Complex64::new(t, 0.0);
    let n = r.nrows();
    for i in 0..n {
        r[(i, i)] = Complex64::new(r[(i, i)].re, 0.0);
        for j in 0..i {
            r[(i, j)] = r[(j, i)].conj();
        }
    }
    r
}

/// Eigen-split of a covariance into signal and noise subspaces.
#[derive(Debug, Clone)]
pub struct Subspaces {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors of the `K` largest eigenvalues.
    pub signal: DMatrix<Complex64>,
    /// Eigenvectors of the remaining `N - K` eigenvalues.
    pub noise: DMatrix<Complex64>,
}

pub fn noise_subspace(r: &DMatrix<Complex64>, sources: usize) -> Result<Subspaces> {
    let n = r.nrows();
    if r.ncols() != n {
        return Err(Error::invalid("covariance", "must be square"));
    }
    if sources == 0 || sources >= n {
        return Err(Error::invalid(
            "sources",
            format!("source count must lie in 1..{n} for {n} antennas"),
        ));
    }
    let eig = SymmetricEigen::new(r.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let upper = eigenvalues[sources - 1];
    let lower = eigenvalues[sources];
    if (upper - lower).abs() <= DEGENERACY_TOLERANCE * upper.abs().max(lower.abs()) {
        return Err(Error::DegenerateSubspace { lower, upper });
    }
    let pick = |idx: &[usize]| {
        DMatrix::from_fn(n, idx.len(), |i, j| eig.eigenvectors[(i, idx[j])])
    };
    Ok(Subspaces {
        signal: pick(&order[..sources]),
        noise: pick(&order[sources..]),
        eigenvalues,
    })
}

/// Uniform angle grid `step, 2·step, …` strictly inside `(0, π)`.
pub fn angle_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < std::f64::consts::PI) {
        return Err(Error::invalid("angle_step", "must lie in (0, π)"));
    }
    Ok((1..)
        .map(|i| i as f64 * step)
        .take_while(|&a| a < std::f64::consts::PI)
        .collect())
}

/// Uniform distance grid from `min` to `max` inclusive.
pub fn distance_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min && step > 0.0) {
        return Err(Error::invalid("distance_grid", "need 0 < min < max and a positive step"));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| min + i as f64 * step).collect())
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() || !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid(name, "grid must be non-empty and strictly increasing"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Music1d {
    pub spectrum: Vec<f64>,
    pub index: usize,
    pub angle: f64,
}

/// Pseudo-spectrum `1 / ‖U_nᴴ a(φ)‖²` of one sub-array over `grid`.
pub fn music_1d(
    sub: &Subspaces,
    offsets: &[f64],
    carrier: &CarrierSpec,
    grid: &[f64],
) -> Result<Music1d> {
    check_grid("angle_grid", grid)?;
    let spectrum: Vec<f64> = grid
        .iter()
        .map(|&phi| {
            let a = far_steering(offsets, phi, carrier);
            let proj = sub.noise.ad_mul(&a);
            1.0 / proj.norm_squared().max(DENOMINATOR_FLOOR)
        })
        .collect();
    let index = argmax(&spectrum);
    Ok(Music1d {
        angle: grid[index],
        index,
        spectrum,
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Music2d {
    pub angle: f64,
    pub distance: f64,
    pub peak: f64,
    /// Steering vectors evaluated by the search.
    pub evaluations: u64,
}

/// Steps between exact phase evaluations in the distance sweep.
const RESYNC_INTERVAL: usize = 32;
/// Largest per-step phase increment handled by the rotation series.
const MAX_SERIES_STEP: f64 = 0.25;

/// Exhaustive 2D-MUSIC over `angles × distances` treating the MLA as one array.
///
/// The spectrum is `1 / (LN − ‖U_sᴴ b(φ, d)‖²)`. Along each distance sweep
/// the element phases are advanced by a rotation series instead of a fresh
/// `sin_cos`, with an exact resync every few steps; every grid point is still
/// evaluated.
pub fn music_2d(
    y: &DMatrix<Complex64>,
    mla: &MlaSpec,
    carrier: &CarrierSpec,
    angles: &[f64],
    distances: &[f64],
    sources: usize,
) -> Result<Music2d> {
    check_grid("angle_grid", angles)?;
    check_grid("distance_grid", distances)?;
    if distances[0] <= 0.0 {
        return Err(Error::invalid("distance_grid", "distances must be positive"));
    }
    if y.nrows() != mla.total_antennas() {
        return Err(Error::invalid("snapshots", "row count must equal the number of antennas"));
    }
    let r = sample_covariance(y);
    let sub = noise_subspace(&r, sources)?;
    let sweep = DistanceSweep::new(mla, carrier, &sub.signal);
    let best: Vec<(f64, usize)> = angles
        .par_iter()
        .map(|&phi| sweep.run(phi, distances))
        .collect();
    let mut bi = 0;
    for (i, b) in best.iter().enumerate() {
        if b.0 < best[bi].0 {
            bi = i;
        }
    }
    let (den, dj) = best[bi];
    Ok(Music2d {
        angle: angles[bi],
        distance: distances[dj],
        peak: 1.0 / den.max(DENOMINATOR_FLOOR),
        evaluations: (angles.len() * distances.len()) as u64,
    })
}

struct DistanceSweep {
    x: Vec<f64>,
    x2: Vec<f64>,
    /// `conj(U_s)` split into real and imaginary planes, one row per source.
    wr: Vec<Vec<f64>>,
    wi: Vec<Vec<f64>>,
    k: f64,
    total: f64,
}

impl DistanceSweep {
    fn new(mla: &MlaSpec, carrier: &CarrierSpec, signal: &DMatrix<Complex64>) -> Self {
        let x = mla.element_positions();
        let x2 = x.iter().map(|v| v * v).collect();
        let wr = (0..signal.ncols())
            .map(|k| signal.column(k).iter().map(|v| v.re).collect())
            .collect();
        let wi = (0..signal.ncols())
            .map(|k| signal.column(k).iter().map(|v| -v.im).collect())
            .collect();
        Self {
            total: x.len() as f64,
            x,
            x2,
            wr,
            wi,
            k: carrier.wavenumber(),
        }
    }

    /// Smallest denominator over `distances` at angle `phi`, and its index.
    fn run(&self, phi: f64, distances: &[f64]) -> (f64, usize) {
        let n = self.x.len();
        let c = phi.cos();
        let mut theta = vec![0.0; n];
        let mut eps = vec![0.0; n];
        let mut zr = vec![0.0; n];
        let mut zi = vec![0.0; n];
        let mut best = (f64::INFINITY, 0);
        for (j, &d) in distances.iter().enumerate() {
            // θₙ = k (dₙ − d); the common phase k·d is dropped.
            let mut max_eps: f64 = 0.0;
            let d2 = d * d;
            let two_dc = 2.0 * d * c;
            for i in 0..n {
                let dn = (d2 + self.x2[i] - two_dc * self.x[i]).sqrt();
                let t = self.k * (dn - d);
                eps[i] = t - theta[i];
                theta[i] = t;
                max_eps = max_eps.max(eps[i].abs());
            }
            if j % RESYNC_INTERVAL == 0 || max_eps > MAX_SERIES_STEP {
                for i in 0..n {
                    let (s, co) = theta[i].sin_cos();
                    zr[i] = co;
                    zi[i] = -s;
                }
            } else {
                for i in 0..n {
                    let e = eps[i];
                    let e2 = e * e;
                    let cs = 1.0 + e2 * (-0.5 + e2 * (1.0 / 24.0 + e2 * (-1.0 / 720.0 + e2 / 40320.0)));
                    let sn = e * (1.0 + e2 * (-1.0 / 6.0 + e2 * (1.0 / 120.0 - e2 / 5040.0)));
                    // z ← z · e^{−iε}
                    let (a, b) = (zr[i], zi[i]);
                    zr[i] = a * cs + b * sn;
                    zi[i] = b * cs - a * sn;
                }
            }
            let mut power = 0.0;
            for (wr, wi) in self.wr.iter().zip(&self.wi) {
                let mut re = 0.0;
                let mut im = 0.0;
                for i in 0..n {
                    re += wr[i] * zr[i] - wi[i] * zi[i];
                    im += wr[i] * zi[i] + wi[i] * zr[i];
                }
                power += re * re + im * im;
            }
            let den = (self.total - power).max(DENOMINATOR_FLOOR);
            if den < best.0 {
                best = (den, j);
            }
        }
        best
    }
}
