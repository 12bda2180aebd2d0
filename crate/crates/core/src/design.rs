//! Choosing the number of sub-arrays for a single-lobe focal spot.
//!
//! With a fixed aperture, splitting it into more sub-arrays shrinks the gap
//! and pushes the cosine ripple of the cross-range gain outward. The search
//! adds sub-arrays two at a time until only one lobe remains inside the
//! half-power window.

use crate::error::{Error, Result};
use crate::field::{crossrange_gain, half_power_beamwidth, FocalSpec};
use crate::geometry::{spacing_for_aperture, ApertureConvention, CarrierSpec, MlaSpec};
use crate::numerics::pchip_resample;

/// Thresholds a local maximum must clear to count as a lobe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakCriteria {
    /// Resampling factor before peak detection.
    pub upsample: usize,
    /// Minimum height above the higher of the two flanking bases.
    pub min_prominence: f64,
    /// Minimum absolute height; lobes below half power are not beams.
    pub min_height: f64,
}

impl Default for PeakCriteria {
    fn default() -> Self {
        Self {
            upsample: 10,
            min_prominence: 1e-3,
            min_height: 0.5,
        }
    }
}

/// Counts lobes in uniformly spaced `samples`.
///
/// A flat top of equal samples is one peak. Endpoints never count.
pub fn count_peaks(samples: &[f64], criteria: &PeakCriteria) -> usize {
    if samples.len() < 3 {
        return 0;
    }
    let y = pchip_resample(samples, criteria.upsample);
    local_maxima(&y)
        .into_iter()
        .filter(|&i| y[i] >= criteria.min_height && prominence(&y, i) >= criteria.min_prominence)
        .count()
}

/// Interior maxima; plateaus report their middle index.
fn local_maxima(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i - 1] < y[i] {
            let mut j = i;
            while j + 1 < n - 1 && y[j + 1] == y[i] {
                j += 1;
            }
            if y[j + 1] < y[i] {
                peaks.push((i + j) / 2);
                i = j;
            }
        }
        i += 1;
    }
    peaks
}

/// Height above the higher of the minima reached before the signal rises
/// above the peak on either side.
fn prominence(y: &[f64], peak: usize) -> f64 {
    let h = y[peak];
    let mut left = h;
    for &v in y[..peak].iter().rev() {
        if v > h {
            break;
        }
        left = left.min(v);
    }
    let mut right = h;
    for &v in &y[peak + 1..] {
        if v > h {
            break;
        }
        right = right.min(v);
    }
    h - left.max(right)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignInput {
    pub aperture: f64,
    pub focus: f64,
    pub antennas: usize,
    pub carrier: CarrierSpec,
    pub delta: f64,
    /// Cross-range samples across the half-power window.
    pub grid_points: usize,
    pub convention: ApertureConvention,
    pub criteria: PeakCriteria,
}

impl DesignInput {
    /// Half-wavelength spacing, 300 grid points, default convention and criteria.
    pub fn new(aperture: f64, focus: f64, antennas: usize, carrier: CarrierSpec) -> Self {
        Self {
            aperture,
            focus,
            antennas,
            carrier,
            delta: carrier.wavelength() / 2.0,
            grid_points: 300,
            convention: ApertureConvention::default(),
            criteria: PeakCriteria::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be positive"))
            }
        };
        positive("aperture", self.aperture)?;
        positive("focus", self.focus)?;
        positive("delta", self.delta)?;
        if self.antennas == 0 {
            return Err(Error::invalid("antennas", "must be at least 1"));
        }
        if self.grid_points < 16 {
            return Err(Error::invalid("grid_points", "need at least 16 samples"));
        }
        if self.antennas as f64 * self.delta >= self.aperture {
            return Err(Error::Infeasible(format!(
                "one sub-array of {} antennas already spans the {} m aperture",
                self.antennas, self.aperture
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub subarrays: usize,
    pub gap: f64,
    pub delta_bar: f64,
    /// `(L, peak count)` for every L tried.
    pub peak_trace: Vec<(usize, usize)>,
    /// False when the aperture ran out before a single lobe was reached;
    /// the largest feasible L is returned in that case.
    pub single_peak: bool,
}

impl DesignResult {
    pub fn final_peak_count(&self) -> usize {
        self.peak_trace.last().map_or(0, |&(_, c)| c)
    }
}

/// Symmetric grid over `[-half, half]`.
pub(crate) fn symmetric_grid(half: f64, points: usize) -> Vec<f64> {
    let m = (points - 1) as f64;
    (0..points)
        .map(|i| half * (2.0 * i as f64 - m) / m)
        .collect()
}

/// Cross-range lobe count of `mla` inside its half-power window.
pub fn peaks_in_beamwidth(
    mla: &MlaSpec,
    focal: &FocalSpec,
    carrier: &CarrierSpec,
    grid_points: usize,
    criteria: &PeakCriteria,
) -> usize {
    let bw = half_power_beamwidth(mla.antennas(), mla.delta(), focal, carrier);
    let samples: Vec<f64> = symmetric_grid(bw / 2.0, grid_points)
        .iter()
        .map(|&x| crossrange_gain(mla, focal, x, carrier).gain)
        .collect();
    count_peaks(&samples, criteria)
}

/// Smallest even L whose focal spot has a single lobe in the half-power window.
pub fn design_num_arrays(input: &DesignInput) -> Result<DesignResult> {
    input.validate()?;
    let focal = FocalSpec::new(input.focus)?;
    let n = input.antennas;
    let mut trace = Vec::new();
    let mut best: Option<MlaSpec> = None;
    let mut count = usize::MAX;
    let mut l = 0;
    while count > 1 && (l * n) as f64 * input.delta < input.aperture {
        l += 2;
        let gap = match spacing_for_aperture(input.aperture, l, n, input.delta, input.convention) {
            Ok(g) => g,
            Err(Error::Infeasible(_)) => break,
            Err(e) => return Err(e),
        };
        let mla = MlaSpec::new(l, n, input.delta, gap)?;
        count = peaks_in_beamwidth(&mla, &focal, &input.carrier, input.grid_points, &input.criteria);
        trace.push((l, count));
        best = Some(mla);
    }
    let mla = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no even number of {n}-antenna sub-arrays fits in {} m",
            input.aperture
        ))
    })?;
    Ok(DesignResult {
        subarrays: mla.subarrays(),
        gap: mla.gap(),
        delta_bar: mla.delta_bar(),
        single_peak: count == 1,
        peak_trace: trace,
    })
}
