//! The radial operator on profiles `h(r)` multiplying a closed eigenform
//! `η ∧ dr` of the cross section:
//!
//! `Δ₂ h = −[h'' + (n − 2k + 1)(h f'/f)'] + λ0 h / f²`
//!
//! For `h = φ f^μ` it has a closed form in `φ, φ', φ''` and the logarithmic
//! derivatives of `f`, which is what [`delta2_apply_analytic`] evaluates.
//! [`delta2_apply_fd`] discretizes the first form directly and serves as an
//! independent check.

use num_complex::Complex64;

use crate::eigenforms::CutoffProfile;
use crate::error::{LabError, Result};
use crate::warping::WarpingFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorContext {
    pub n: u32,
    pub k: u32,
    /// Eigenvalue of the closed `(k−1)`-form on the cross section.
    pub lambda0: f64,
    pub a0: f64,
}

impl OperatorContext {
    pub fn new(n: u32, k: u32, lambda0: f64, a0: f64) -> Result<Self> {
        if !(lambda0 >= 0.0 && lambda0.is_finite()) {
            return Err(LabError::invalid(format!("lambda0 = {lambda0} must be nonnegative")));
        }
        if !(a0 > 0.0 && a0.is_finite()) {
            return Err(LabError::invalid(format!("a0 = {a0} must be positive")));
        }
        if k > n {
            return Err(LabError::invalid(format!("degree k = {k} exceeds n = {n}")));
        }
        Ok(Self { n, k, lambda0, a0 })
    }

    /// `n − 2k + 1`
    pub fn shift(&self) -> f64 {
        self.n as f64 - 2.0 * self.k as f64 + 1.0
    }
}

/// `h(r) = φ(r) f(r)^μ`; `phi = None` means `φ ≡ 1`.
#[derive(Debug, Clone, Copy)]
pub struct RadialProfile<'a> {
    pub phi: Option<&'a CutoffProfile>,
    pub mu: Complex64,
    pub f: &'a WarpingFunction,
}

impl<'a> RadialProfile<'a> {
    pub fn new(phi: Option<&'a CutoffProfile>, mu: Complex64, f: &'a WarpingFunction) -> Self {
        Self { phi, mu, f }
    }

    fn cutoff(&self, r: f64) -> (f64, f64, f64) {
        self.phi.map_or((1.0, 0.0, 0.0), |c| c.eval(r))
    }

    /// `h(r)`, computed as `φ·exp(μ ln f)`.
    pub fn value(&self, r: f64) -> Result<Complex64> {
        let d = self.f.log_derivatives(r)?;
        Ok(self.cutoff(r).0 * (self.mu * d.ln_f).exp())
    }
}

/// `Δ₂h / f^μ`, free of the (possibly unrepresentable) factor `f^μ`.
pub fn delta2_reduced(h: &RadialProfile, ctx: &OperatorContext, r: f64) -> Result<Complex64> {
    let d = h.f.log_derivatives(r)?;
    let (phi, dphi, ddphi) = h.cutoff(r);
    let mu = h.mu;
    let b = mu + ctx.shift();
    let bracket = b * phi * d.d2
        + (mu - 1.0) * b * phi * d.d1 * d.d1
        + ddphi
        + (2.0 * mu + ctx.shift()) * dphi * d.d1
        - ctx.lambda0 * phi * (-2.0 * d.ln_f).exp();
    Ok(-bracket)
}

/// `Δ₂h / f^μ − λ φ` with `λ = candidate_lambda(μ)`.
///
/// The `a0` parts of `f''/f` and `(f'/f)²` cancel against `λφ` exactly, so
/// this is evaluated from the deviations `f''/f − a0` and `(f'/f)² − a0`,
/// which keeps full relative accuracy when the defect is tiny.
pub fn eigen_defect(h: &RadialProfile, ctx: &OperatorContext, r: f64) -> Result<Complex64> {
    let d = h.f.log_derivatives(r)?;
    let (phi, dphi, ddphi) = h.cutoff(r);
    let mu = h.mu;
    let b = mu + ctx.shift();
    let bracket = b * phi * d.dev2
        + (mu - 1.0) * b * phi * d.dev1
        + ddphi
        + (2.0 * mu + ctx.shift()) * dphi * d.d1
        - ctx.lambda0 * phi * (-2.0 * d.ln_f).exp();
    Ok(-bracket)
}

pub fn delta2_apply_analytic(h: &RadialProfile, ctx: &OperatorContext, r: f64) -> Result<Complex64> {
    let reduced = delta2_reduced(h, ctx, r)?;
    let ln_f = h.f.log_derivatives(r)?.ln_f;
    Ok(reduced * (h.mu * ln_f).exp())
}

/// `Δ₂h` for an arbitrary profile given `(h, h', h'')` at `r`.
pub fn delta2_apply_exact(
    h: (Complex64, Complex64, Complex64),
    f: &WarpingFunction,
    ctx: &OperatorContext,
    r: f64,
) -> Result<Complex64> {
    let d = f.log_derivatives(r)?;
    let (v, dv, ddv) = h;
    let g_prime = d.d2 - d.d1 * d.d1;
    let hg_prime = dv * d.d1 + v * g_prime;
    Ok(-(ddv + ctx.shift() * hg_prime) + ctx.lambda0 * v * (-2.0 * d.ln_f).exp())
}

/// Uniform grid `r0, …, r1` with `m` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub r0: f64,
    pub r1: f64,
    pub m: usize,
}

impl UniformGrid {
    pub fn step(&self) -> f64 {
        (self.r1 - self.r0) / (self.m - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.m {
            self.r1
        } else {
            self.r0 + self.step() * i as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.node(i)).collect()
    }
}

/// Second-order central differences for `h''` and `h'`; `(h f'/f)'` is
/// expanded by the product rule with analytic `f'/f` and `(f'/f)'`.
/// Returns the `m − 2` interior values.
pub fn delta2_apply_fd(
    h_samples: &[Complex64],
    f: &WarpingFunction,
    ctx: &OperatorContext,
    grid: &UniformGrid,
) -> Result<Vec<Complex64>> {
    if grid.m < 5 {
        return Err(LabError::GridTooCoarse { m: grid.m });
    }
    if h_samples.len() != grid.m {
        return Err(LabError::invalid(format!(
            "{} samples given for a grid of {} nodes",
            h_samples.len(),
            grid.m
        )));
    }
    if !(grid.r1 > grid.r0) {
        return Err(LabError::invalid("grid needs r1 > r0"));
    }
    let dr = grid.step();
    (1..grid.m - 1)
        .map(|i| {
            let (hm, h0, hp) = (h_samples[i - 1], h_samples[i], h_samples[i + 1]);
            let ddh = (hp - 2.0 * h0 + hm) / (dr * dr);
            let dh = (hp - hm) / (2.0 * dr);
            delta2_apply_exact((h0, dh, ddh), f, ctx, grid.node(i))
        })
        .collect()
}

/// `λ = −a0 μ (μ + n − 2k + 1)`
pub fn candidate_lambda(mu: Complex64, ctx: &OperatorContext) -> Complex64 {
    -ctx.a0 * mu * (mu + ctx.shift())
}

/// `μ = −(n−1)/p + (k−1) + i s`
pub fn mu_for(p: f64, k: u32, n: u32, s: f64) -> Complex64 {
    Complex64::new(-(n as f64 - 1.0) / p + (k as f64 - 1.0), s)
}
