//! Comparison solutions of `u'' + q u = 0`, `u(0) = 0`, `u'(0) = 1`.
//!
//! With `q ≤ −(a0 + ε)` piecewise constant (a stiffer middle segment
//! `−K²` on `[s, t)`), `u^{n−1}` is the Jacobian of the comparison model, so
//! `∫₀^r u^{n−1}` controls volume growth of geodesic balls.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiecewiseQ {
    pub a0: f64,
    pub eps: f64,
    /// Middle-segment rate `K ≥ √(a0 + eps)`.
    pub k: f64,
    pub s: f64,
    pub t: f64,
}

impl PiecewiseQ {
    pub fn new(a0: f64, eps: f64, k: f64, s: f64, t: f64) -> Result<Self> {
        let q = Self { a0, eps, k, s, t };
        q.validate()?;
        Ok(q)
    }

    /// `q ≡ −alpha`, encoded with `eps = 0` and an empty middle segment.
    pub fn constant(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, alpha.sqrt(), 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.a0, self.eps, self.k, self.s, self.t].iter().all(|v| v.is_finite());
        if !all_finite || !(self.a0 > 0.0) || self.eps < 0.0 {
            return Err(LabError::invalid("piecewise q needs a0 > 0 and eps >= 0"));
        }
        if self.k < self.outer_rate() * (1.0 - 1e-12) {
            return Err(LabError::invalid(format!(
                "K = {} is below sqrt(a0 + eps) = {}",
                self.k,
                self.outer_rate()
            )));
        }
        if self.s < 0.0 || self.t < self.s {
            return Err(LabError::invalid("breakpoints need 0 <= s <= t"));
        }
        Ok(())
    }

    /// `√(a0 + eps)`
    pub fn outer_rate(&self) -> f64 {
        (self.a0 + self.eps).sqrt()
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.s && r < self.t {
            -self.k * self.k
        } else {
            -(self.a0 + self.eps)
        }
    }

    /// The three-branch upper bound on `u`.
    pub fn upper_bound(&self, r: f64) -> f64 {
        let al = self.outer_rate();
        if r < self.s {
            (r * al).exp() / al
        } else if r < self.t {
            (self.s * al + self.k * (r - self.s)).exp() / al
        } else {
            self.k / (al * al) * (self.s * al + self.k * (self.t - self.s) + (r - self.t) * al).exp()
        }
    }

    /// `sinh(r √(a0+eps)) / √(a0+eps)`
    pub fn lower_bound(&self, r: f64) -> f64 {
        let al = self.outer_rate();
        (r * al).sinh() / al
    }
}

/// Coefficient of the Sturm problem.
#[derive(Clone)]
pub enum Coefficient {
    Piecewise(PiecewiseQ),
    Profile(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::Piecewise(q) => f.debug_tuple("Piecewise").field(q).finish(),
            Coefficient::Profile(_) => f.write_str("Profile(..)"),
        }
    }
}

impl From<PiecewiseQ> for Coefficient {
    fn from(q: PiecewiseQ) -> Self {
        Coefficient::Piecewise(q)
    }
}

#[derive(Debug, Clone)]
pub struct SturmSolution {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub u_prime: Vec<f64>,
    pub q: Coefficient,
    pub step: f64,
}

fn aligned(x: f64, h: f64) -> bool {
    let m = x / h;
    (m - m.round()).abs() <= 1e-9 * m.abs().max(1.0)
}

/// Largest step `≤ target` of the form `s/m` (or `t/m`) on which both
/// breakpoints of `q` are nodes.
pub fn snapped_step(q: &PiecewiseQ, target: f64) -> Result<f64> {
    if !(target > 0.0) {
        return Err(LabError::invalid("step must be positive"));
    }
    let ok = |h: f64| aligned(q.s, h) && aligned(q.t, h);
    if ok(target) {
        return Ok(target);
    }
    let base = if q.s > 0.0 { q.s } else { q.t };
    let first = (base / target).ceil() as u64;
    (first..first.saturating_mul(1000).max(first + 1))
        .map(|m| base / m as f64)
        .find(|&h| ok(h))
        .ok_or(LabError::BreakpointMisaligned { at: q.t, step: target })
}

/// Default resolution: `r_max / 10⁵`, snapped onto the breakpoints.
pub fn default_step(q: &PiecewiseQ, r_max: f64) -> Result<f64> {
    snapped_step(q, r_max / 1e5)
}

fn rk4<F: Fn(f64) -> f64>(q: &F, r: f64, y: [f64; 2], h: f64, frozen: Option<f64>) -> [f64; 2] {
    let qv = |x: f64| frozen.unwrap_or_else(|| q(x));
    let rhs = |x: f64, y: [f64; 2]| [y[1], -qv(x) * y[0]];
    let k1 = rhs(r, y);
    let k2 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Classical RK4 on `(u, u')` over `[0, r_max]` with a fixed step.
///
/// For a piecewise coefficient each step lies inside one segment, and the
/// segment value is used for all four stages.
pub fn solve_sturm(q: impl Into<Coefficient>, r_max: f64, step: f64) -> Result<SturmSolution> {
    let q = q.into();
    if !(r_max > 0.0 && r_max.is_finite()) || !(step > 0.0) {
        return Err(LabError::invalid("solve_sturm needs r_max > 0 and step > 0"));
    }
    if let Coefficient::Piecewise(pq) = &q {
        pq.validate()?;
        for bp in [pq.s, pq.t] {
            if bp <= r_max && !aligned(bp, step) {
                return Err(LabError::BreakpointMisaligned { at: bp, step });
            }
        }
    }
    let n_steps = (r_max / step - 1e-9).ceil() as usize;
    let mut r = Vec::with_capacity(n_steps + 1);
    let mut u = Vec::with_capacity(n_steps + 1);
    let mut du = Vec::with_capacity(n_steps + 1);
    let mut y = [0.0, 1.0];
    for i in 0..=n_steps {
        let ri = step * i as f64;
        r.push(ri);
        u.push(y[0]);
        du.push(y[1]);
        if i == n_steps {
            break;
        }
        y = match &q {
            Coefficient::Piecewise(pq) => {
                let seg = pq.eval(ri + 0.5 * step);
                rk4(&|x| pq.eval(x), ri, y, step, Some(seg))
            }
            Coefficient::Profile(f) => rk4(&|x| f(x), ri, y, step, None),
        };
        if !(y[0].is_finite() && y[1].is_finite()) {
            return Err(LabError::Overflow { r: ri + step });
        }
    }
    Ok(SturmSolution { r, u, u_prime: du, q, step })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsCheck {
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// Largest excess over either bound, relative to `max(1, |bound|)`.
    pub max_violation: f64,
}

pub const DEFAULT_BOUND_TOL: f64 = 1e-10;

pub fn check_bounds(sol: &SturmSolution, q: &PiecewiseQ) -> BoundsCheck {
    check_bounds_with_tol(sol, q, DEFAULT_BOUND_TOL)
}

pub fn check_bounds_with_tol(sol: &SturmSolution, q: &PiecewiseQ, tol: f64) -> BoundsCheck {
    let mut lower_v = 0.0f64;
    let mut upper_v = 0.0f64;
    for (&r, &u) in sol.r.iter().zip(&sol.u) {
        let lo = q.lower_bound(r);
        let hi = q.upper_bound(r);
        lower_v = lower_v.max((lo - u) / lo.abs().max(1.0));
        upper_v = upper_v.max((u - hi) / hi.abs().max(1.0));
    }
    BoundsCheck { lower_ok: lower_v <= tol, upper_ok: upper_v <= tol, max_violation: lower_v.max(upper_v) }
}

impl SturmSolution {
    pub fn r_max(&self) -> f64 {
        *self.r.last().expect("solution has at least one node")
    }

    /// Node values of `∫₀^{r_i} u^{n−1}`.
    ///
    /// Even nodes use composite Simpson; odd nodes add the one-panel
    /// quadratic rule `h/12 (5 f₀ + 8 f₁ − f₂)` to the preceding even node.
    pub fn cumulative_integral(&self, n: u32) -> Vec<f64> {
        let pw = n as i32 - 1;
        let g: Vec<f64> = self.u.iter().map(|u| u.powi(pw)).collect();
        let h = self.step;
        let m = g.len();
        let mut out = vec![0.0; m];
        let mut i = 0;
        while i + 2 < m {
            out[i + 1] = out[i] + h / 12.0 * (5.0 * g[i] + 8.0 * g[i + 1] - g[i + 2]);
            out[i + 2] = out[i] + h / 3.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
            i += 2;
        }
        if i + 1 < m {
            out[i + 1] = if i == 0 {
                h / 2.0 * (g[0] + g[1])
            } else {
                out[i] + h / 12.0 * (-g[i - 1] + 8.0 * g[i] + 5.0 * g[i + 1])
            };
        }
        out
    }

    fn integral_to(&self, cum: &[f64], n: u32, r: f64) -> Result<f64> {
        let (lo, hi) = (0.0, self.r_max());
        if !(r >= lo && r <= hi) {
            return Err(LabError::OutOfDomain { r, lo, hi });
        }
        let i = ((r / self.step).floor() as usize).min(self.r.len() - 1);
        let dr = r - self.r[i];
        if dr <= 1e-12 * self.step || i + 1 == self.r.len() {
            return Ok(cum[i]);
        }
        // partial panel: Simpson with cubic Hermite values of u
        let pw = n as i32 - 1;
        let herm = |x: f64| {
            let t = (x - self.r[i]) / self.step;
            let h = self.step;
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * self.u[i]
                + (t3 - 2.0 * t2 + t) * h * self.u_prime[i]
                + (-2.0 * t3 + 3.0 * t2) * self.u[i + 1]
                + (t3 - t2) * h * self.u_prime[i + 1]
        };
        let mid = herm(self.r[i] + 0.5 * dr);
        let end = herm(r);
        Ok(cum[i] + dr / 6.0 * (self.u[i].powi(pw) + 4.0 * mid.powi(pw) + end.powi(pw)))
    }
}

/// `∫₀^r u^{n−1} / ∫₀^1 u^{n−1}`.
pub fn volume_ratio(sol: &SturmSolution, n: u32, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(LabError::invalid("dimension n must be at least 2"));
    }
    if r < 1.0 {
        return Err(LabError::OutOfDomain { r, lo: 1.0, hi: sol.r_max() });
    }
    let cum = sol.cumulative_integral(n);
    Ok(sol.integral_to(&cum, n, r)? / sol.integral_to(&cum, n, 1.0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub gamma_hat: f64,
    pub window: (f64, f64),
    pub n: u32,
    /// Root-mean-square residual of the linear fit.
    pub fit_residual: f64,
    pub fit_tolerance: f64,
}

pub const MIN_WINDOW: f64 = 5.0;
pub const FIT_TOLERANCE: f64 = 1e-3;

/// Last third of the integration range.
pub fn default_window(sol: &SturmSolution) -> (f64, f64) {
    let r = sol.r_max();
    (2.0 * r / 3.0, r)
}

/// Least-squares slope of `ln ∫₀^r u^{n−1}` against `r` over the window nodes.
pub fn growth_rate(sol: &SturmSolution, n: u32, window: (f64, f64)) -> Result<GrowthEstimate> {
    let (lo, hi) = window;
    if !(hi - lo >= MIN_WINDOW) {
        return Err(LabError::WindowTooShort { len: hi - lo });
    }
    if n < 2 {
        return Err(LabError::invalid("dimension n must be at least 2"));
    }
    if lo <= 0.0 || hi > sol.r_max() * (1.0 + 1e-12) {
        return Err(LabError::OutOfDomain { r: if lo <= 0.0 { lo } else { hi }, lo: 0.0, hi: sol.r_max() });
    }
    let cum = sol.cumulative_integral(n);
    let (xs, ys): (Vec<f64>, Vec<f64>) = sol
        .r
        .iter()
        .zip(&cum)
        .filter(|(r, _)| **r >= lo && **r <= hi)
        .map(|(r, c)| (*r, c.ln()))
        .unzip();
    if xs.len() < 3 || ys.iter().any(|y| !y.is_finite()) {
        return Err(LabError::invalid("window holds too few usable nodes"));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(GrowthEstimate { gamma_hat: slope, window, n, fit_residual: rms, fit_tolerance: FIT_TOLERANCE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_coefficient_solutions() {
        let q1 = PiecewiseQ::constant(1.0).unwrap();
        let sol = solve_sturm(q1, 2.0, 1e-3).unwrap();
        assert!((sol.u.last().unwrap() - 2f64.sinh()).abs() < 1e-8);
        let q4 = PiecewiseQ::constant(4.0).unwrap();
        let sol = solve_sturm(q4, 3.0, 1e-3).unwrap();
        for (r, u) in sol.r.iter().zip(&sol.u).step_by(250) {
            assert!((u - (2.0 * r).sinh() / 2.0).abs() <= 1e-9 * u.abs().max(1.0));
        }
    }

    #[test]
    fn misaligned_breakpoint() {
        let q = PiecewiseQ::new(0.9, 0.1, 2.0, 1.05, 2.0).unwrap();
        assert!(matches!(solve_sturm(q, 5.0, 0.1), Err(LabError::BreakpointMisaligned { .. })));
        let h = snapped_step(&q, 0.1).unwrap();
        assert!(solve_sturm(q, 5.0, h).is_ok());
    }

    #[test]
    fn bounds_examples() {
        let q = PiecewiseQ::constant(1.0).unwrap();
        let sol = solve_sturm(q, 5.0, 1e-3).unwrap();
        let b = check_bounds(&sol, &q);
        assert!(b.lower_ok && b.upper_ok && b.max_violation <= 1e-10);

        let q = PiecewiseQ::new(0.9, 0.1, 2.0, 1.0, 2.0).unwrap();
        let sol = solve_sturm(q, 6.0, 1e-3).unwrap();
        let b = check_bounds(&sol, &q);
        assert!(b.lower_ok && b.upper_ok, "{b:?}");

        let q = PiecewiseQ::new(0.9, 0.1, 1.0, 1.0, 2.0).unwrap();
        let sol = solve_sturm(q, 6.0, 1e-3).unwrap();
        let b = check_bounds(&sol, &q);
        assert!(b.lower_ok && b.upper_ok);
    }

    #[test]
    fn volume_ratio_examples() {
        let sol = solve_sturm(PiecewiseQ::constant(1.0).unwrap(), 4.0, 1e-3).unwrap();
        assert!((volume_ratio(&sol, 2, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let exact = (2f64.cosh() - 1.0) / (1f64.cosh() - 1.0);
        assert!((volume_ratio(&sol, 2, 2.0).unwrap() - exact).abs() < 1e-6);
        assert!(volume_ratio(&sol, 2, 0.5).is_err());
        assert!(volume_ratio(&sol, 2, 4.5).is_err());
        // off-node radius
        let off = volume_ratio(&sol, 2, 2.0004).unwrap();
        let exact_off = (2.0004f64.cosh() - 1.0) / (1f64.cosh() - 1.0);
        assert!((off - exact_off).abs() < 1e-6);
    }

    #[test]
    fn cumulative_simpson_odd_nodes() {
        let sol = solve_sturm(PiecewiseQ::constant(1.0).unwrap(), 1.0, 0.01).unwrap();
        let cum = sol.cumulative_integral(2);
        for (r, c) in sol.r.iter().zip(&cum) {
            assert!((c - (r.cosh() - 1.0)).abs() < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn growth_examples() {
        let sol = solve_sturm(PiecewiseQ::constant(1.0).unwrap(), 25.0, 1e-3).unwrap();
        let g = growth_rate(&sol, 3, (15.0, 25.0)).unwrap();
        assert!((g.gamma_hat - 2.0).abs() < 0.02);
        assert!(matches!(growth_rate(&sol, 3, (15.0, 19.0)), Err(LabError::WindowTooShort { .. })));
        assert!(growth_rate(&sol, 3, (20.0, 30.0)).is_err());
    }
}
