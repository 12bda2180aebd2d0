//! Special functions, quadrature and interpolation.

mod fresnel;
mod interp;
mod quadrature;

pub use fresnel::{fresnel_integrals, FresnelPair};
pub use interp::pchip_resample;
pub use quadrature::{integrate_cell, Cell, QuadratureRule};

/// Normalized sinc, `sin(πx)/(πx)`.
pub fn normalized_sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        // 1 - (πx)²/6 is exact to double precision here.
        let px = std::f64::consts::PI * x;
        return 1.0 - px * px / 6.0;
    }
    let px = std::f64::consts::PI * x;
    px.sin() / px
}
