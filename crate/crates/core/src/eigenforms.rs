//! Approximate eigenforms `ω = φ f^μ η ∧ dr` and their residuals.
//!
//! The cutoff `φ` is a quintic smoothstep ramp up on `[A−1, A]`, equal to one
//! on `[A, B]` and ramping down on `[B, B+1]`. With the canonical real part
//! of `μ` the radial weight of `|ω|^p` cancels, so all integrals below are
//! plain `dr` integrals scaled by the angular constant.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::quadrature::{adaptive_simpson, integrate_from_left, QuadratureOptions};
use crate::radialop::{candidate_lambda, eigen_defect, mu_for, OperatorContext, RadialProfile};
use crate::warping::{Family, WarpingFunction};

/// `sup |S'|` for the quintic smoothstep `S = 6t⁵ − 15t⁴ + 10t³`.
pub const CUTOFF_C1: f64 = 15.0 / 8.0;
/// Certified bound on `sup |S''| = 10/√3 ≈ 5.774`.
pub const CUTOFF_C2: f64 = 6.0;

fn smoothstep(t: f64) -> (f64, f64, f64) {
    let t = t.clamp(0.0, 1.0);
    let (t2, t3) = (t * t, t * t * t);
    let s = t3 * (10.0 - 15.0 * t + 6.0 * t2);
    let ds = 30.0 * t2 * (1.0 - t) * (1.0 - t);
    let dds = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    (s, ds, dds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffProfile {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn make_cutoff(a: f64, b: f64) -> Result<CutoffProfile> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(LabError::InvalidInterval { a, b });
    }
    Ok(CutoffProfile { a, b, c1: CUTOFF_C1, c2: CUTOFF_C2 })
}

impl CutoffProfile {
    /// `(φ, φ', φ'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        if r <= self.a - 1.0 || r >= self.b + 1.0 {
            (0.0, 0.0, 0.0)
        } else if r < self.a {
            smoothstep(r - (self.a - 1.0))
        } else if r <= self.b {
            (1.0, 0.0, 0.0)
        } else {
            let (s, ds, dds) = smoothstep(self.b + 1.0 - r);
            (s, -ds, dds)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a - 1.0, self.b + 1.0)
    }

    pub fn plateau(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn ramps(&self) -> [(f64, f64); 2] {
        [(self.a - 1.0, self.a), (self.b, self.b + 1.0)]
    }
}

/// Sup-norm constants of the angular cutoff `χ` in the hyperbolic construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiConstants {
    /// `sup |Δ_S χ|`
    pub lap: f64,
    /// `sup |∇χ|`
    pub grad: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularData {
    /// `∫_N |η|^p`, normalized to 1 by default.
    pub eta_norm_const: f64,
    pub chi: Option<ChiConstants>,
}

impl Default for AngularData {
    fn default() -> Self {
        Self { eta_norm_const: 1.0, chi: None }
    }
}

impl AngularData {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_norm_const > 0.0 && self.eta_norm_const.is_finite()) {
            return Err(LabError::invalid("eta_norm_const must be positive"));
        }
        if let Some(c) = self.chi {
            let all_pos = [c.lap, c.grad, c.lower, c.upper].iter().all(|v| *v > 0.0 && v.is_finite());
            if !all_pos || c.lower > c.upper {
                return Err(LabError::invalid("chi constants must be positive with lower <= upper"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Warped,
    Hyperbolic,
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(LabError::invalid(format!("residuals need a finite p >= 1, got {p}")));
    }
    Ok(())
}

/// Exponent of `f` in the radial weight of `|ω|^p`: `p(Re μ − (k−1)) + (n−1)`.
pub fn weight_exponent(mu: Complex64, p: f64, n: u32, k: u32) -> f64 {
    p * (mu.re - (k as f64 - 1.0)) + (n as f64 - 1.0)
}

fn integrate_profile<F: Fn(f64) -> f64>(
    phi: &CutoffProfile,
    integrand: &F,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let [(l0, l1), (r0, r1)] = phi.ramps();
    Ok(adaptive_simpson(integrand, l0, l1, opts)?
        + integrate_from_left(integrand, phi.a, phi.b, opts)?
        + adaptive_simpson(integrand, r0, r1, opts)?)
}

fn integrate_ramps<F: Fn(f64) -> f64>(phi: &CutoffProfile, integrand: &F, opts: &QuadratureOptions) -> Result<f64> {
    phi.ramps()
        .iter()
        .map(|&(lo, hi)| adaptive_simpson(integrand, lo, hi, opts))
        .sum()
}

/// `‖ω‖_p = (eta · ∫ φ^p f^{p(Re μ − (k−1)) + (n−1)} dr)^{1/p}`.
pub fn omega_lp_norm(
    f: &WarpingFunction,
    phi: &CutoffProfile,
    mu: Complex64,
    p: f64,
    n: u32,
    k: u32,
    ang: &AngularData,
) -> Result<f64> {
    omega_lp_norm_with(f, phi, mu, p, n, k, ang, &QuadratureOptions::default())
}

#[allow(clippy::too_many_arguments)]
fn omega_lp_norm_with(
    f: &WarpingFunction,
    phi: &CutoffProfile,
    mu: Complex64,
    p: f64,
    n: u32,
    k: u32,
    ang: &AngularData,
    opts: &QuadratureOptions,
) -> Result<f64> {
    check_exponent(p)?;
    ang.validate()?;
    let expected = -(n as f64 - 1.0) / p + (k as f64 - 1.0);
    if (mu.re - expected).abs() > 1e-12 {
        return Err(LabError::WeightMismatch { re_mu: mu.re, expected });
    }
    let e = weight_exponent(mu, p, n, k);
    let integral = if e.abs() <= 1e-14 {
        integrate_profile(phi, &|r: f64| phi.eval(r).0.powf(p), opts)?
    } else {
        let (lo, _) = f.domain();
        if phi.a - 1.0 < lo {
            return Err(LabError::OutOfDomain { r: phi.a - 1.0, lo, hi: f.domain().1 });
        }
        integrate_profile(
            phi,
            &|r: f64| {
                let ln_f = f.log_derivatives(r).map(|d| d.ln_f).unwrap_or(f64::NAN);
                phi.eval(r).0.powf(p) * (e * ln_f).exp()
            },
            opts,
        )?
    };
    Ok((ang.eta_norm_const * integral).powf(1.0 / p))
}

/// The residual summands, each already raised to the `p`-th power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualTerms {
    pub i: f64,
    pub ii: f64,
    pub iii: f64,
    pub iv: f64,
    pub v: f64,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub a3: Option<f64>,
}

impl ResidualTerms {
    pub fn sum(&self) -> f64 {
        self.i + self.ii + self.iii + self.iv + self.v + self.angular_sum()
    }

    fn angular_sum(&self) -> f64 {
        self.a1.unwrap_or(0.0) + self.a2.unwrap_or(0.0) + self.a3.unwrap_or(0.0)
    }

    pub fn as_array(&self) -> [(&'static str, Option<f64>); 8] {
        [
            ("I", Some(self.i)),
            ("II", Some(self.ii)),
            ("III", Some(self.iii)),
            ("IV", Some(self.iv)),
            ("V", Some(self.v)),
            ("A1", self.a1),
            ("A2", self.a2),
            ("A3", self.a3),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualBreakdown {
    pub terms: ResidualTerms,
    /// `‖ω‖_p` (not its `p`-th power).
    pub omega_norm_p: f64,
    /// `(Σ terms)^{1/p} / ‖ω‖_p`, the triangle-inequality bound.
    pub ratio: f64,
    /// `‖Δω − λω‖_p` computed from the pointwise residual.
    pub direct_residual: f64,
    pub direct_ratio: f64,
    pub lambda: Complex64,
    pub mu: Complex64,
}

fn check_mode(f: &WarpingFunction, ctx: &OperatorContext, ang: &AngularData, mode: Mode) -> Result<()> {
    if (f.a0() - ctx.a0).abs() > 1e-12 * ctx.a0 {
        return Err(LabError::invalid(format!(
            "warping a0 = {} differs from operator a0 = {}",
            f.a0(),
            ctx.a0
        )));
    }
    if mode == Mode::Hyperbolic {
        if f.family() != Family::Sinh || f.a0() != 1.0 || f.scale() != 1.0 {
            return Err(LabError::ModeMismatch);
        }
        if ang.chi.is_none() {
            return Err(LabError::invalid("hyperbolic mode needs chi constants"));
        }
    }
    Ok(())
}

pub fn residual_terms(
    f: &WarpingFunction,
    phi: &CutoffProfile,
    mu: Complex64,
    p: f64,
    ctx: &OperatorContext,
    ang: &AngularData,
    mode: Mode,
) -> Result<ResidualBreakdown> {
    residual_terms_with(f, phi, mu, p, ctx, ang, mode, &QuadratureOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn residual_terms_with(
    f: &WarpingFunction,
    phi: &CutoffProfile,
    mu: Complex64,
    p: f64,
    ctx: &OperatorContext,
    ang: &AngularData,
    mode: Mode,
    opts: &QuadratureOptions,
) -> Result<ResidualBreakdown> {
    check_exponent(p)?;
    ang.validate()?;
    check_mode(f, ctx, ang, mode)?;
    let (lo, hi) = f.domain();
    let (s0, s1) = phi.support();
    if s0 < lo || s1 > hi {
        return Err(LabError::OutOfDomain { r: if s0 < lo { s0 } else { s1 }, lo, hi });
    }

    let norm = omega_lp_norm_with(f, phi, mu, p, ctx.n, ctx.k, ang, opts)?;
    let shift = ctx.shift();
    let b = mu + shift;
    let c_i = ((mu - 1.0) * b).norm().powf(p);
    let c_ii = b.norm().powf(p);
    let c_iv = (2.0 * mu + shift).norm().powf(p);
    // f is evaluated only inside the support, where log_derivatives succeeds
    let logd = |r: f64| f.log_derivatives(r).expect("support checked against domain");

    let t_i = c_i * integrate_profile(
        phi,
        &|r: f64| {
            let d = logd(r);
            phi.eval(r).0.powf(p) * d.dev1.abs().powf(p)
        },
        opts,
    )?;
    let t_ii = c_ii * integrate_profile(
        phi,
        &|r: f64| phi.eval(r).0.powf(p) * logd(r).dev2.abs().powf(p),
        opts,
    )?;
    let t_iii = integrate_ramps(phi, &|r: f64| phi.eval(r).2.abs().powf(p), opts)?;
    let t_iv = c_iv * integrate_ramps(phi, &|r: f64| (phi.eval(r).1 * logd(r).d1).abs().powf(p), opts)?;
    let inv_f2p = integrate_profile(
        phi,
        &|r: f64| phi.eval(r).0.powf(p) * (-2.0 * p * logd(r).ln_f).exp(),
        opts,
    )?;
    let t_v = ctx.lambda0.powf(p) * inv_f2p;

    let lambda = candidate_lambda(mu, ctx);
    let h = RadialProfile::new(Some(phi), mu, f);
    let direct_integral = integrate_profile(
        phi,
        &|r: f64| {
            eigen_defect(&h, ctx, r).expect("support checked against domain").norm().powf(p)
        },
        opts,
    )?;

    let eta = ang.eta_norm_const;
    let (upper, lower) = match ang.chi {
        Some(c) if mode == Mode::Hyperbolic => (c.upper, c.lower),
        _ => (1.0, 1.0),
    };
    let scale = eta * upper;
    let mut terms = ResidualTerms {
        i: scale * t_i,
        ii: scale * t_ii,
        iii: scale * t_iii,
        iv: scale * t_iv,
        v: scale * t_v,
        a1: None,
        a2: None,
        a3: None,
    };
    if let (Mode::Hyperbolic, Some(chi)) = (mode, ang.chi) {
        let grad_weight = integrate_profile(
            phi,
            &|r: f64| {
                let d = logd(r);
                phi.eval(r).0.powf(p) * d.d1.abs().powf(p) * (-p * d.ln_f).exp()
            },
            opts,
        )?;
        let two_grad = (2.0 * chi.grad).powf(p);
        terms.a1 = Some(eta * chi.lap.powf(p) * inv_f2p);
        terms.a2 = Some(eta * two_grad * inv_f2p);
        terms.a3 = Some(eta * two_grad * grad_weight);
    }

    let norm = norm * lower.powf(1.0 / p);
    let direct_p = scale * direct_integral + terms.angular_sum();
    let direct_residual = direct_p.powf(1.0 / p);
    Ok(ResidualBreakdown {
        terms,
        omega_norm_p: norm,
        ratio: terms.sum().powf(1.0 / p) / norm,
        direct_residual,
        direct_ratio: direct_residual / norm,
        lambda,
        mu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub breakdown: ResidualBreakdown,
}

impl SweepRow {
    pub fn ratio(&self) -> f64 {
        self.breakdown.ratio
    }
}

/// Slack allowed between consecutive ratios after the second entry.
pub const DECAY_SLACK: f64 = 1.05;

/// Residuals along a schedule of cutoffs with `μ = mu_for(p, k, n, s)`.
///
/// Rows are computed in parallel on the current rayon pool. Fails with
/// `NotDecaying` when the bound ratio ends above where it started or grows
/// by more than [`DECAY_SLACK`] between consecutive late entries.
#[allow(clippy::too_many_arguments)]
pub fn decay_sweep(
    f: &WarpingFunction,
    p: f64,
    ctx: &OperatorContext,
    ang: &AngularData,
    mode: Mode,
    schedule: &[(f64, f64)],
    s: f64,
) -> Result<Vec<SweepRow>> {
    let rows = sweep_rows(f, p, ctx, ang, mode, schedule, s)?;
    check_decay(&rows)?;
    Ok(rows)
}

/// Same as [`decay_sweep`] without the decay assertion.
#[allow(clippy::too_many_arguments)]
pub fn sweep_rows(
    f: &WarpingFunction,
    p: f64,
    ctx: &OperatorContext,
    ang: &AngularData,
    mode: Mode,
    schedule: &[(f64, f64)],
    s: f64,
) -> Result<Vec<SweepRow>> {
    check_exponent(p)?;
    if schedule.is_empty() {
        return Err(LabError::invalid("sweep schedule is empty"));
    }
    for w in schedule.windows(2) {
        let ((a0, b0), (a1, b1)) = (w[0], w[1]);
        if !(a1 > a0 && b1 - a1 > b0 - a0) {
            return Err(LabError::invalid("schedule must increase A and B - A at every step"));
        }
    }
    let mu = mu_for(p, ctx.k, ctx.n, s);
    schedule
        .par_iter()
        .map(|&(a, b)| {
            let phi = make_cutoff(a, b)?;
            let breakdown = residual_terms(f, &phi, mu, p, ctx, ang, mode)?;
            Ok(SweepRow { a, b, s, breakdown })
        })
        .collect()
}

pub fn check_decay(rows: &[SweepRow]) -> Result<()> {
    let (Some(first), Some(last)) = (rows.first(), rows.last()) else { return Ok(()) };
    let growing = rows.windows(2).skip(1).any(|w| w[1].ratio() > DECAY_SLACK * w[0].ratio());
    if last.ratio() > first.ratio() || growing {
        return Err(LabError::NotDecaying { first: first.ratio(), last: last.ratio() });
    }
    Ok(())
}
