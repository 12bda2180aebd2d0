use crate::geometry::{CarrierSpec, MlaSpec};
use nalgebra::DVector;
use num_complex::Complex64;

/// Element positions of one sub-array relative to its own centre.
pub fn subarray_offsets(mla: &MlaSpec) -> Vec<f64> {
    let c = mla.subarray_center(0);
    mla.subarray_positions(0).iter().map(|x| x - c).collect()
}

/// Plane-wave response `exp(i k x cos φ)` of elements at offsets `x`.
///
/// Offsets are taken relative to the sub-array centre so that the centre is
/// the phase reference.
pub fn far_steering(offsets: &[f64], phi: f64, carrier: &CarrierSpec) -> DVector<Complex64> {
    let kc = carrier.wavenumber() * phi.cos();
    DVector::from_iterator(
        offsets.len(),
        offsets.iter().map(|&x| Complex64::from_polar(1.0, kc * x)),
    )
}

/// Spherical-wave response `exp(-i k dₙ)` of the whole array for a source at
/// distance `d` and angle `phi` from the array centre.
pub fn near_steering(mla: &MlaSpec, phi: f64, d: f64, carrier: &CarrierSpec) -> DVector<Complex64> {
    let k = carrier.wavenumber();
    let c = phi.cos();
    let pos = mla.element_positions();
    DVector::from_iterator(
        pos.len(),
        pos.iter().map(|&x| {
            let dn = (d * d + x * x - 2.0 * x * d * c).sqrt();
            Complex64::from_polar(1.0, -k * dn)
        }),
    )
}
