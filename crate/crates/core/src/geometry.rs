//! Array geometry: carrier, modular linear array layout and aperture metrics.
//!
//! A modular linear array (MLA) is `L` identical uniform linear arrays of
//! `N` elements each, laid out on the x-axis and centred on the origin.
//! Elements inside a sub-array are `delta` apart; the innermost elements of
//! adjacent sub-arrays are `gap` apart (centre to centre).

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Carrier frequency and wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierSpec {
    frequency: f64,
    wavelength: f64,
}

impl CarrierSpec {
    pub fn from_frequency(frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return Err(Error::invalid("frequency", "must be positive and finite"));
        }
        Ok(Self {
            frequency: frequency_hz,
            wavelength: SPEED_OF_LIGHT / frequency_hz,
        })
    }

    pub fn from_wavelength(wavelength_m: f64) -> Result<Self> {
        if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
            return Err(Error::invalid("wavelength", "must be positive and finite"));
        }
        Ok(Self {
            frequency: SPEED_OF_LIGHT / wavelength_m,
            wavelength: wavelength_m,
        })
    }

    #[inline]
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    #[inline]
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Wavenumber 2π/λ.
    #[inline]
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }
}

/// How a total aperture length `D` is split between sub-arrays and gaps.
///
/// Both variants agree on what the gap means (centre-to-centre distance of
/// the innermost elements of neighbouring sub-arrays); they differ in how
/// much element length is charged against `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApertureConvention {
    /// `D = (L-1)·gap + L·N·delta`: every sub-array is charged its full
    /// `N·delta` length. Reproduces the reported design points
    /// (0.72 m gap for `L=2, N=64, D=2`; `L=62` for `N=1`).
    #[default]
    SubarrayLengths,
    /// `D = (L-1)·gap + (L(N-1)+1)·delta`: the physical extent from the
    /// outer edge of the first element cell to the outer edge of the last.
    ElementExtent,
}

impl ApertureConvention {
    /// Length charged to the elements for given `L`, `N`, `delta`.
    fn element_length(self, l: usize, n: usize, delta: f64) -> f64 {
        match self {
            ApertureConvention::SubarrayLengths => (l * n) as f64 * delta,
            ApertureConvention::ElementExtent => (l * (n - 1) + 1) as f64 * delta,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ApertureConvention::SubarrayLengths => "subarray_lengths",
            ApertureConvention::ElementExtent => "element_extent",
        }
    }
}

impl std::str::FromStr for ApertureConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "subarray_lengths" => Ok(ApertureConvention::SubarrayLengths),
            "element_extent" => Ok(ApertureConvention::ElementExtent),
            other => Err(format!(
                "unknown aperture convention `{other}` (expected subarray_lengths or element_extent)"
            )),
        }
    }
}

/// Layout of a modular linear array.
#[derive(Debug, Clone, PartialEq)]
pub struct MlaSpec {
    subarrays: usize,
    antennas: usize,
    delta: f64,
    gap: f64,
}

impl MlaSpec {
    /// `subarrays` ULAs of `antennas` elements, element spacing `delta` and
    /// inner-element gap `gap` between neighbouring sub-arrays.
    pub fn new(subarrays: usize, antennas: usize, delta: f64, gap: f64) -> Result<Self> {
        if subarrays == 0 {
            return Err(Error::invalid("subarrays", "at least one sub-array is required"));
        }
        if antennas == 0 {
            return Err(Error::invalid("antennas", "at least one antenna per sub-array is required"));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid("delta", "element spacing must be positive"));
        }
        if !gap.is_finite() || gap < delta * (1.0 - 1e-12) {
            return Err(Error::invalid(
                "gap",
                format!("gap {gap} must be at least the element spacing {delta}"),
            ));
        }
        Ok(Self {
            subarrays,
            antennas,
            delta,
            gap,
        })
    }

    /// A plain ULA (one sub-array).
    pub fn ula(antennas: usize, delta: f64) -> Result<Self> {
        Self::new(1, antennas, delta, delta)
    }

    /// Lay out `subarrays` sub-arrays so that the total aperture is `aperture`.
    pub fn from_aperture(
        subarrays: usize,
        antennas: usize,
        delta: f64,
        aperture: f64,
        convention: ApertureConvention,
    ) -> Result<Self> {
        if subarrays == 1 {
            return Self::ula(antennas, delta);
        }
        let gap = spacing_for_aperture(aperture, subarrays, antennas, delta, convention)?;
        Self::new(subarrays, antennas, delta, gap)
    }

    #[inline]
    pub fn subarrays(&self) -> usize {
        self.subarrays
    }

    #[inline]
    pub fn antennas(&self) -> usize {
        self.antennas
    }

    #[inline]
    pub fn total_antennas(&self) -> usize {
        self.subarrays * self.antennas
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Half the distance between the centres of two adjacent sub-arrays.
    #[inline]
    pub fn delta_bar(&self) -> f64 {
        (self.gap + (self.antennas - 1) as f64 * self.delta) / 2.0
    }

    /// Centre of sub-array `l` (zero-based).
    pub fn subarray_center(&self, l: usize) -> f64 {
        let offset = l as f64 + 1.0 - (self.subarrays as f64 + 1.0) / 2.0;
        offset * 2.0 * self.delta_bar()
    }

    pub fn subarray_centers(&self) -> Vec<f64> {
        (0..self.subarrays).map(|l| self.subarray_center(l)).collect()
    }

    /// x-coordinates of the elements of sub-array `l` (zero-based).
    pub fn subarray_positions(&self, l: usize) -> Vec<f64> {
        let center = self.subarray_center(l);
        let mid = (self.antennas as f64 + 1.0) / 2.0;
        (0..self.antennas)
            .map(|n| (n as f64 + 1.0 - mid) * self.delta + center)
            .collect()
    }

    /// All element x-coordinates, sub-array by sub-array.
    pub fn element_positions(&self) -> Vec<f64> {
        (0..self.subarrays)
            .flat_map(|l| self.subarray_positions(l))
            .collect()
    }

    /// Aperture from the outer edge of the first element cell to the outer
    /// edge of the last one.
    pub fn aperture(&self) -> f64 {
        (self.subarrays - 1) as f64 * self.gap
            + (self.subarrays * (self.antennas - 1) + 1) as f64 * self.delta
    }

    /// Distance between the outermost element centres.
    pub fn element_span(&self) -> f64 {
        self.aperture() - self.delta
    }

    pub fn metrics(&self, carrier: &CarrierSpec) -> ArrayMetrics {
        derived_metrics(self, carrier)
    }
}

/// Derived aperture quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayMetrics {
    /// Physical aperture of the whole MLA.
    pub aperture: f64,
    pub delta_bar: f64,
    /// `2 D²/λ` for the whole MLA.
    pub fraunhofer_mla: f64,
    /// `2 (Nδ)²/λ` for a single sub-array.
    pub fraunhofer_ula: f64,
    /// `2 ((N-1)δ)²/λ`, the same distance measured between outer element centres.
    pub fraunhofer_ula_span: f64,
}

pub fn derived_metrics(mla: &MlaSpec, carrier: &CarrierSpec) -> ArrayMetrics {
    let lambda = carrier.wavelength();
    let aperture = mla.aperture();
    let ula = mla.antennas as f64 * mla.delta;
    let ula_span = (mla.antennas - 1) as f64 * mla.delta;
    ArrayMetrics {
        aperture,
        delta_bar: mla.delta_bar(),
        fraunhofer_mla: 2.0 * aperture * aperture / lambda,
        fraunhofer_ula: 2.0 * ula * ula / lambda,
        fraunhofer_ula_span: 2.0 * ula_span * ula_span / lambda,
    }
}

/// Gap between sub-arrays that makes `subarrays` sub-arrays fill `aperture`.
pub fn spacing_for_aperture(
    aperture: f64,
    subarrays: usize,
    antennas: usize,
    delta: f64,
    convention: ApertureConvention,
) -> Result<f64> {
    if subarrays < 2 {
        return Err(Error::invalid("subarrays", "need at least two sub-arrays to place a gap"));
    }
    if antennas == 0 {
        return Err(Error::invalid("antennas", "at least one antenna per sub-array is required"));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid("delta", "element spacing must be positive"));
    }
    if !(aperture.is_finite() && aperture > 0.0) {
        return Err(Error::invalid("aperture", "must be positive"));
    }
    let gap = (aperture - convention.element_length(subarrays, antennas, delta))
        / (subarrays - 1) as f64;
    if gap < delta * (1.0 - 1e-12) {
        return Err(Error::Infeasible(format!(
            "{subarrays} sub-arrays of {antennas} antennas do not fit in {aperture} m \
             (gap {gap:.6} m < element spacing {delta} m)"
        )));
    }
    Ok(gap)
}
