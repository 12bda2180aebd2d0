//! Per-sub-array MUSIC localization fused by least-squares triangulation,
//! plus the whole-array 2D-MUSIC baseline.
//!
//! Angles are measured from the positive x-axis, so broadside is `π/2`.

mod music;
mod snapshots;
mod steering;
mod triangulate;

pub use music::{
    angle_grid, distance_grid, music_1d, music_2d, noise_subspace, sample_covariance,
    Music1d, Music2d, Subspaces,
};
pub use snapshots::{synthesize_snapshots, Scenario, SignalModel, SnapshotSet};
pub use steering::{far_steering, near_steering, subarray_offsets};
pub use triangulate::{nmse, triangulate, PositionEstimate};

use crate::error::Result;

/// Angles estimated by each sub-array.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleEstimates {
    pub angles: Vec<f64>,
    /// Optional MUSIC spectra, one per sub-array, on the search grid.
    pub spectra: Option<Vec<Vec<f64>>>,
}

/// Runs 1D-MUSIC on every sub-array of `set` with `sources` sources.
pub fn estimate_angles(
    set: &SnapshotSet,
    grid: &[f64],
    sources: usize,
    keep_spectra: bool,
) -> Result<AngleEstimates> {
    let mla = &set.scenario.mla;
    let offsets = subarray_offsets(mla);
    let mut angles = Vec::with_capacity(mla.subarrays());
    let mut spectra = keep_spectra.then(Vec::new);
    for y in &set.subarrays {
        let r = sample_covariance(y);
        let sub = noise_subspace(&r, sources)?;
        let m = music_1d(&sub, &offsets, &set.scenario.carrier, grid)?;
        angles.push(m.angle);
        if let Some(s) = spectra.as_mut() {
            s.push(m.spectrum);
        }
    }
    Ok(AngleEstimates { angles, spectra })
}

/// Full proposed pipeline: per-sub-array MUSIC then triangulation.
pub fn localize(set: &SnapshotSet, grid: &[f64], sources: usize, ridge: f64) -> Result<PositionEstimate> {
    let est = estimate_angles(set, grid, sources, false)?;
    triangulate(&est.angles, &set.scenario.mla.subarray_centers(), ridge)
}
