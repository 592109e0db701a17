//! Curvature of `dr² + f(r)² g_N`.
//!
//! Planes containing `∂_r` have curvature `−f''/f`; planes tangent to the
//! cross section have `(sec_N − f'²)/f²`. Both are evaluated through the
//! logarithmic derivatives of `f`, so they stay finite at large radii.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::warping::WarpingFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub r: f64,
    pub sec_radial: f64,
    pub sec_spherical_range: (f64, f64),
    pub ricci_lower: f64,
    pub n: u32,
}

impl CurvatureReport {
    /// Smallest and largest sectional curvature at `r`.
    pub fn bracket(&self) -> (f64, f64) {
        let (lo, hi) = self.sec_spherical_range;
        (self.sec_radial.min(lo), self.sec_radial.max(hi))
    }
}

pub fn sectional(f: &WarpingFunction, r: f64, sec_n_range: (f64, f64), n: u32) -> Result<CurvatureReport> {
    let (lo, hi) = sec_n_range;
    if !(lo <= hi) {
        return Err(LabError::invalid(format!("sec_N range ({lo}, {hi}) is not ordered")));
    }
    if n < 2 {
        return Err(LabError::invalid("dimension n must be at least 2"));
    }
    let d = f.log_derivatives(r)?;
    let inv_f2 = (-2.0 * d.ln_f).exp();
    let tangential = |sec_n: f64| sec_n * inv_f2 - d.d1 * d.d1;
    let sec_radial = -d.d2;
    let range = (tangential(lo), tangential(hi));
    Ok(CurvatureReport {
        r,
        sec_radial,
        sec_spherical_range: range,
        ricci_lower: (n as f64 - 1.0) * sec_radial.min(range.0),
        n,
    })
}

/// `f(−ln x / √a0) · x`, the scale of the compactified metric at `x`.
pub fn conformal_factor(f: &WarpingFunction, a0: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(LabError::invalid(format!("x = {x} must lie in (0, 1)")));
    }
    if !(a0 > 0.0) {
        return Err(LabError::invalid("a0 must be positive"));
    }
    let r = -x.ln() / a0.sqrt();
    let d = f.log_derivatives(r)?;
    Ok((d.ln_f + x.ln()).exp())
}

/// `e^{K2 t} · p(t, x, y)`, the bound on the form heat kernel given the
/// scalar kernel value and the Weitzenböck lower bound `−K2`.
pub fn heat_kernel_bound(k2: f64, t: f64, scalar_kernel_value: f64) -> Result<f64> {
    if !(t > 0.0) || !(scalar_kernel_value > 0.0) {
        return Err(LabError::invalid("heat kernel bound needs t > 0 and a positive scalar value"));
    }
    Ok((k2 * t).exp() * scalar_kernel_value)
}
