//! Warping functions `f` for metrics `dr² + f(r)² g_N` on `(c0, ∞) × N`.
//!
//! Analytic families are evaluated in closed form. ODE-generated and tabulated
//! profiles are stored on a grid and interpolated with cubic Hermite
//! polynomials, which keeps the interpolant C¹.
//!
//! Everything downstream works with the logarithmic quantities
//! `ln f`, `f'/f` and `f''/f` (see [`LogDerivatives`]) because the cutoff
//! supports used by the residual sweeps reach radii where `f` itself is far
//! beyond `f64` range.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quadrature::{adaptive_simpson, QuadratureOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Exp,
    Sinh,
    Cosh,
    PerturbedOde,
    Tabulated,
}

/// Perturbation profiles `q(t)` for `f'' = (a0 + q) f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Zero,
    /// `amplitude · e^{-rate·t}`
    ExpDecay {
        #[serde(default = "one")]
        amplitude: f64,
        rate: f64,
    },
    /// `amplitude / (1 + t²)`
    InverseSquare {
        #[serde(default = "one")]
        amplitude: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Potential {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::ExpDecay { amplitude, rate } => amplitude * (-rate * t).exp(),
            Potential::InverseSquare { amplitude } => amplitude / (1.0 + t * t),
        }
    }
}

/// `(f, f', f'')` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpValue {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// `(ln f, f'/f, f''/f)` at a point. Finite wherever `f > 0`, even when `f`
/// overflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDerivatives {
    pub ln_f: f64,
    pub d1: f64,
    pub d2: f64,
    /// `(f'/f)² − a0`, in closed form for the analytic families.
    pub dev1: f64,
    /// `f''/f − a0`
    pub dev2: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Samples {
    r: Vec<f64>,
    f: Vec<f64>,
    df: Vec<f64>,
    ddf: Vec<f64>,
    potential: Option<Potential>,
}

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    Exp,
    Sinh,
    Cosh,
    Sampled(Samples),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpingFunction {
    a0: f64,
    c: f64,
    c0: f64,
    profile: Profile,
}

fn check_scale(a0: f64, c: f64) -> Result<()> {
    if !(a0 > 0.0 && a0.is_finite()) {
        return Err(LabError::invalid(format!("a0 must be positive, got {a0}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(LabError::invalid(format!("scale c must be positive, got {c}")));
    }
    Ok(())
}

/// `ln sinh x` for `x > 0` without overflow.
fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p()
}

impl WarpingFunction {
    /// `f(r) = c·e^{√a0 r}`
    pub fn exp(a0: f64, c: f64, c0: f64) -> Result<Self> {
        check_scale(a0, c)?;
        Ok(Self { a0, c, c0, profile: Profile::Exp })
    }

    /// `f(r) = c·sinh(√a0 r)`; the left endpoint is clamped to at least 0.
    pub fn sinh(a0: f64, c: f64, c0: f64) -> Result<Self> {
        check_scale(a0, c)?;
        Ok(Self { a0, c, c0: c0.max(0.0), profile: Profile::Sinh })
    }

    /// `f(r) = c·cosh(√a0 r)`
    pub fn cosh(a0: f64, c: f64, c0: f64) -> Result<Self> {
        check_scale(a0, c)?;
        Ok(Self { a0, c, c0, profile: Profile::Cosh })
    }

    /// Builds a tabulated profile from samples of `(r, f, f', f'')`.
    ///
    /// `a0` is the curvature scale the profile is meant to approach; it is
    /// only used by reports, never by interpolation.
    pub fn tabulated(a0: f64, r: Vec<f64>, f: Vec<f64>, df: Vec<f64>, ddf: Vec<f64>) -> Result<Self> {
        check_scale(a0, 1.0)?;
        let n = r.len();
        if n < 2 || f.len() != n || df.len() != n || ddf.len() != n {
            return Err(LabError::invalid("tabulated arrays must share a length of at least 2"));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LabError::invalid("tabulated radii must be strictly increasing"));
        }
        let c0 = r[0];
        Ok(Self {
            a0,
            c: 1.0,
            c0,
            profile: Profile::Sampled(Samples { r, f, df, ddf, potential: None }),
        })
    }

    pub fn family(&self) -> Family {
        match &self.profile {
            Profile::Exp => Family::Exp,
            Profile::Sinh => Family::Sinh,
            Profile::Cosh => Family::Cosh,
            Profile::Sampled(s) if s.potential.is_some() => Family::PerturbedOde,
            Profile::Sampled(_) => Family::Tabulated,
        }
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn scale(&self) -> f64 {
        self.c
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// The closed interval on which [`eval`](Self::eval) succeeds.
    pub fn domain(&self) -> (f64, f64) {
        match &self.profile {
            Profile::Sampled(s) => (s.r[0], s.r[s.r.len() - 1]),
            _ => (self.c0, f64::INFINITY),
        }
    }

    /// Grid nodes of a sampled profile.
    pub fn nodes(&self) -> Option<&[f64]> {
        match &self.profile {
            Profile::Sampled(s) => Some(&s.r),
            _ => None,
        }
    }

    fn check_domain(&self, r: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if r.is_nan() || r < lo || r > hi {
            return Err(LabError::OutOfDomain { r, lo, hi });
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> Result<WarpValue> {
        self.check_domain(r)?;
        let sa = self.a0.sqrt();
        let x = sa * r;
        let c = self.c;
        Ok(match &self.profile {
            Profile::Exp => {
                let e = c * x.exp();
                WarpValue { value: e, first: sa * e, second: self.a0 * e }
            }
            Profile::Sinh => WarpValue {
                value: c * x.sinh(),
                first: c * sa * x.cosh(),
                second: c * self.a0 * x.sinh(),
            },
            Profile::Cosh => WarpValue {
                value: c * x.cosh(),
                first: c * sa * x.sinh(),
                second: c * self.a0 * x.cosh(),
            },
            Profile::Sampled(s) => s.interpolate(self.a0, r),
        })
    }

    pub fn log_derivatives(&self, r: f64) -> Result<LogDerivatives> {
        self.check_domain(r)?;
        let sa = self.a0.sqrt();
        let x = sa * r;
        let ln_c = self.c.ln();
        let out = match &self.profile {
            Profile::Exp => LogDerivatives { ln_f: ln_c + x, d1: sa, d2: self.a0, dev1: 0.0, dev2: 0.0 },
            Profile::Sinh => LogDerivatives {
                ln_f: ln_c + ln_sinh(x),
                d1: sa / x.tanh(),
                d2: self.a0,
                dev1: self.a0 / x.sinh().powi(2),
                dev2: 0.0,
            },
            Profile::Cosh => LogDerivatives {
                ln_f: ln_c + ln_cosh(x),
                d1: sa * x.tanh(),
                d2: self.a0,
                dev1: -self.a0 / x.cosh().powi(2),
                dev2: 0.0,
            },
            Profile::Sampled(s) => {
                let v = s.interpolate(self.a0, r);
                let (d1, d2) = (v.first / v.value, v.second / v.value);
                LogDerivatives { ln_f: v.value.ln(), d1, d2, dev1: d1 * d1 - self.a0, dev2: d2 - self.a0 }
            }
        };
        if !(out.ln_f.is_finite() && out.d1.is_finite() && out.d2.is_finite()) {
            return Err(LabError::invalid(format!("warping function is not positive at r = {r}")));
        }
        Ok(out)
    }
}

impl Samples {
    fn interpolate(&self, a0: f64, r: f64) -> WarpValue {
        let n = self.r.len();
        let i = self.r.partition_point(|&x| x <= r).clamp(1, n - 1) - 1;
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let herm = |y0: f64, m0: f64, y1: f64, m1: f64| h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
        let value = herm(self.f[i], self.df[i], self.f[i + 1], self.df[i + 1]);
        let first = herm(self.df[i], self.ddf[i], self.df[i + 1], self.ddf[i + 1]);
        let second = match &self.potential {
            Some(q) => (a0 + q.eval(r)) * value,
            None => (1.0 - t) * self.ddf[i] + t * self.ddf[i + 1],
        };
        WarpValue { value, first, second }
    }
}

/// Finite-window proxy for membership of `f` in class B.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassBReport {
    /// `sup |f''/f − a0|` over the window.
    pub sup_dev_second: f64,
    /// `sup |(f'/f)² − a0|` over the window.
    pub sup_dev_first: f64,
    /// `min f` over the window (may be `inf` when `f` overflows).
    pub min_tail_value: f64,
    pub min_tail_log: f64,
    pub verdict: bool,
    pub tail_window: (f64, f64),
    pub samples: usize,
}

pub const CLASS_B_MIN_SAMPLES: usize = 1001;
pub const DEFAULT_GROWTH_FLOOR: f64 = 1e3;

pub fn class_b_report(f: &WarpingFunction, tail_window: (f64, f64), tol: f64, growth_floor: f64) -> Result<ClassBReport> {
    class_b_report_sampled(f, tail_window, tol, growth_floor, CLASS_B_MIN_SAMPLES)
}

pub fn class_b_report_sampled(
    f: &WarpingFunction,
    tail_window: (f64, f64),
    tol: f64,
    growth_floor: f64,
    samples: usize,
) -> Result<ClassBReport> {
    let (lo, hi) = tail_window;
    if !(tol > 0.0) {
        return Err(LabError::invalid("class B tolerance must be positive"));
    }
    if !(hi > lo) || lo <= f.c0() {
        return Err(LabError::invalid(format!("tail window ({lo}, {hi}) must satisfy c0 < r_lo < r_hi")));
    }
    if !(growth_floor > 0.0) {
        return Err(LabError::invalid("growth floor must be positive"));
    }
    let samples = samples.max(CLASS_B_MIN_SAMPLES);
    let mut sup2 = 0.0f64;
    let mut sup1 = 0.0f64;
    let mut min_log = f64::INFINITY;
    for i in 0..samples {
        let r = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let d = f.log_derivatives(r)?;
        sup2 = sup2.max(d.dev2.abs());
        sup1 = sup1.max(d.dev1.abs());
        min_log = min_log.min(d.ln_f);
    }
    let verdict = sup2 <= tol && sup1 <= tol && min_log >= growth_floor.ln();
    Ok(ClassBReport {
        sup_dev_second: sup2,
        sup_dev_first: sup1,
        min_tail_value: min_log.exp(),
        min_tail_log: min_log,
        verdict,
        tail_window,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Bound on the Richardson local error estimate per step, relative to the
    /// size of the state.
    pub local_tol: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { local_tol: 1e-9 }
    }
}

fn rk4_step(a0: f64, q: &Potential, r: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let rhs = |r: f64, y: [f64; 2]| [y[1], (a0 + q.eval(r)) * y[0]];
    let k1 = rhs(r, y);
    let k2 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

pub fn integrate_perturbed(
    a0: f64,
    q: &Potential,
    init: (f64, f64),
    r_span: (f64, f64),
    step: f64,
) -> Result<WarpingFunction> {
    integrate_perturbed_with(a0, q, init, r_span, step, &IntegrationOptions::default())
}

/// Classical RK4 on `(f, f')` with a step-doubling error estimate.
///
/// The step is shrunk so that it divides the span exactly. Each step is
/// taken as two half steps; the difference from the single full step
/// (divided by 15) is the local error estimate.
pub fn integrate_perturbed_with(
    a0: f64,
    q: &Potential,
    init: (f64, f64),
    r_span: (f64, f64),
    step: f64,
    opts: &IntegrationOptions,
) -> Result<WarpingFunction> {
    check_scale(a0, 1.0)?;
    let (r0, r1) = r_span;
    if !(r1 > r0) || !(step > 0.0) {
        return Err(LabError::invalid("integration needs r1 > r0 and a positive step"));
    }
    let (f0, df0) = init;
    if f0 < 0.0 || (f0 == 0.0 && df0 == 0.0) {
        return Err(LabError::invalid("initial data must have f0 >= 0 and (f0, f0') != (0, 0)"));
    }
    let n_steps = ((r1 - r0) / step - 1e-9).ceil().max(1.0) as usize;
    let h = (r1 - r0) / n_steps as f64;

    let mut r = Vec::with_capacity(n_steps + 1);
    let mut f = Vec::with_capacity(n_steps + 1);
    let mut df = Vec::with_capacity(n_steps + 1);
    let mut ddf = Vec::with_capacity(n_steps + 1);
    let mut y = [f0, df0];
    for i in 0..=n_steps {
        let ri = if i == n_steps { r1 } else { r0 + h * i as f64 };
        r.push(ri);
        f.push(y[0]);
        df.push(y[1]);
        ddf.push((a0 + q.eval(ri)) * y[0]);
        if i == n_steps {
            break;
        }
        let full = rk4_step(a0, q, ri, y, h);
        let half = rk4_step(a0, q, ri, y, 0.5 * h);
        let two = rk4_step(a0, q, ri + 0.5 * h, half, 0.5 * h);
        let scale = two[0].abs().max(two[1].abs()).max(f64::MIN_POSITIVE);
        let estimate = (two[0] - full[0]).abs().max((two[1] - full[1]).abs()) / 15.0 / scale;
        if !(two[0].is_finite() && two[1].is_finite()) || two[0].abs() > 1e300 || two[1].abs() > 1e300 {
            return Err(LabError::Overflow { r: ri + h });
        }
        if estimate > opts.local_tol {
            return Err(LabError::StepTooLarge { r: ri, estimate, tol: opts.local_tol });
        }
        y = two;
    }
    if f[1..].iter().any(|&v| v <= 0.0) {
        return Err(LabError::invalid("integrated profile is not positive on the span"));
    }
    Ok(WarpingFunction {
        a0,
        c: 1.0,
        c0: r0,
        profile: Profile::Sampled(Samples { r, f, df, ddf, potential: Some(*q) }),
    })
}

/// Largest `|f'' − (a0 + q) f|` over the stored grid, relative to `max(1, |f|)`.
pub fn ode_residual(f: &WarpingFunction) -> Option<f64> {
    let Profile::Sampled(s) = &f.profile else { return None };
    let q = s.potential?;
    Some(
        s.r.iter()
            .zip(&s.f)
            .zip(&s.ddf)
            .map(|((&r, &fv), &d2)| (d2 - (f.a0 + q.eval(r)) * fv).abs() / fv.abs().max(1.0))
            .fold(0.0, f64::max),
    )
}

/// Uniform sample grid `lo, …, hi` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SampleGrid {
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.count.max(2);
        (0..n).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HartmanReport {
    pub lambda: f64,
    pub t: Vec<f64>,
    /// `Q_λ(t) = ∫_t^∞ q(s) e^{-2λs} ds`
    pub q_values: Vec<f64>,
    /// `e^{2λt} Q_λ(t)`, the quantity the conditions are phrased in.
    pub scaled_values: Vec<f64>,
    pub ratio_bound_ok: bool,
    pub integrability_ok: bool,
    pub square_integrability_ok: bool,
    pub decay_ok: bool,
    /// Fitted exponent of `|e^{2λt} Q_λ|` against `t` over the second half of the grid.
    pub tail_power: Option<f64>,
}

impl HartmanReport {
    pub fn all_ok(&self) -> bool {
        self.ratio_bound_ok && self.integrability_ok && self.square_integrability_ok && self.decay_ok
    }
}

/// Truncation offset `U` with `e^{-2λU} = 1e-14`.
fn hartman_cutoff(lambda: f64) -> f64 {
    14.0 * std::f64::consts::LN_10 / (2.0 * lambda)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Checks the asymptotic-solution conditions for `u'' − (λ² + q) u = 0`.
///
/// `Q_λ` is computed in the scaled form `e^{2λt}Q_λ(t) = ∫_0^U q(t+u) e^{-2λu} du`
/// with `U` chosen so the monotone tail bound `|q(t+U)| e^{-2λU}/(2λ)` is
/// negligible. Integrability, square integrability and decay are judged on
/// the finite grid: the scaled values must be dominated by `|q|/(2λ)` and
/// their power-law tail exponent must be below −1, −1/2 and 0 respectively.
pub fn hartman_check<F: Fn(f64) -> f64>(q: F, lambda: f64, t0: f64, grid: &SampleGrid) -> Result<HartmanReport> {
    if !(lambda > 0.0) {
        return Err(LabError::invalid("lambda must be positive"));
    }
    if grid.lo < t0 || !(grid.hi > grid.lo) || grid.count < 4 {
        return Err(LabError::invalid("grid must lie in [T0, ∞) with at least 4 points"));
    }
    let opts = QuadratureOptions::default();
    let u_max = hartman_cutoff(lambda);
    let two_l = 2.0 * lambda;
    let mut ts = Vec::with_capacity(grid.count);
    let mut scaled = Vec::with_capacity(grid.count);
    let mut qvals = Vec::with_capacity(grid.count);
    let mut ratio_ok = true;
    for t in grid.points() {
        let qt = q(t);
        let tail = q(t + u_max).abs() * (-two_l * u_max).exp() / two_l;
        let own_scale = qt.abs() * (-two_l * t).exp() / two_l;
        let tail_abs = tail * (-two_l * t).exp();
        if tail_abs > 1e-14 && tail_abs > 1e-14 * own_scale {
            return Err(LabError::TailNotNegligible { t, bound: tail_abs });
        }
        // the floor follows the natural scale |q(t)|/(2λ) of the answer
        let local = QuadratureOptions { abs_floor: (1e-14 * qt.abs() / two_l).max(f64::MIN_POSITIVE), ..opts };
        let g = adaptive_simpson(&|u: f64| q(t + u) * (-two_l * u).exp(), 0.0, u_max, &local)?;
        if g.abs() > qt.abs() / two_l * (1.0 + 1e-9) + 1e-300 {
            ratio_ok = false;
        }
        ts.push(t);
        scaled.push(g);
        qvals.push(g * (-two_l * t).exp());
    }

    let half = ts.len() / 2;
    let (lx, ly): (Vec<f64>, Vec<f64>) = ts[half..]
        .iter()
        .zip(&scaled[half..])
        .filter(|(t, g)| **t > 0.0 && **g != 0.0)
        .map(|(t, g)| (t.ln(), g.abs().ln()))
        .unzip();
    let all_zero = scaled.iter().all(|&g| g == 0.0);
    let tail_power = (lx.len() >= 3).then(|| least_squares_slope(&lx, &ly));

    let finite = scaled.iter().all(|g| g.is_finite());
    let (integrable, square_integrable, decays) = if all_zero {
        (true, true, true)
    } else {
        let power = tail_power.unwrap_or(f64::NAN);
        let peak = scaled.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let last = scaled.last().copied().unwrap_or(0.0).abs();
        (
            finite && ratio_ok && power < -1.0,
            finite && ratio_ok && power < -0.5,
            finite && power < 0.0 && last <= 1e-2 * peak,
        )
    };
    Ok(HartmanReport {
        lambda,
        t: ts,
        q_values: qvals,
        scaled_values: scaled,
        ratio_bound_ok: ratio_ok,
        integrability_ok: integrable,
        square_integrability_ok: square_integrable,
        decay_ok: decays,
        tail_power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn sinh_at_origin() {
        let f = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
        let v = f.eval(0.0).unwrap();
        assert_eq!((v.value, v.first, v.second), (0.0, 1.0, 0.0));
    }

    #[test]
    fn exp_closed_form() {
        let f = WarpingFunction::exp(4.0, 1.0, 0.0).unwrap();
        let v = f.eval(1.0).unwrap();
        let e2 = E * E;
        assert!(close(v.value, e2, 1e-15));
        assert!(close(v.first, 2.0 * e2, 1e-15));
        assert!(close(v.second, 4.0 * e2, 1e-15));
        // f'' = a0 f exactly
        assert_eq!(v.second, 4.0 * v.value);
    }

    #[test]
    fn hyperbolic_identity_bounded() {
        // ((f'/f)² − a0) f² = c² a0 (cosh² − sinh²) = ±c² a0
        for (f, sign) in [
            (WarpingFunction::sinh(2.0, 0.5, 0.0).unwrap(), 1.0),
            (WarpingFunction::cosh(2.0, 0.5, 0.0).unwrap(), -1.0),
        ] {
            for r in [0.3, 1.0, 2.5, 4.0] {
                let v = f.eval(r).unwrap();
                let lhs = v.first * v.first - 2.0 * v.value * v.value;
                assert!(close(lhs, sign * 0.25 * 2.0, 1e-6), "{lhs}");
                assert!(((v.second / v.value) - 2.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn out_of_domain() {
        let f = WarpingFunction::exp(1.0, 1.0, 2.0).unwrap();
        assert!(matches!(f.eval(1.0), Err(LabError::OutOfDomain { .. })));
        let t = WarpingFunction::tabulated(1.0, vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(t.eval(2.5).is_err());
        assert!(t.eval(0.5).is_err());
        assert!(t.eval(1.5).is_ok());
    }

    #[test]
    fn log_derivatives_survive_overflow() {
        let f = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
        let d = f.log_derivatives(2000.0).unwrap();
        assert!(close(d.ln_f, 2000.0 - std::f64::consts::LN_2, 1e-15));
        assert_eq!(d.d2, 1.0);
        assert!((d.d1 - 1.0).abs() < 1e-15);
        let c = WarpingFunction::cosh(4.0, 3.0, 0.0).unwrap();
        let d = c.log_derivatives(0.7).unwrap();
        assert!(close(d.ln_f, (3.0 * (1.4f64).cosh()).ln(), 1e-14));
    }

    #[test]
    fn tabulated_hermite_reproduces_cubics() {
        // f = 2 + r + r²/2 + r³/6; Hermite from (f, f') is exact for cubics.
        let rs: Vec<f64> = (0..6).map(|i| 1.0 + i as f64 * 0.5).collect();
        let f = |r: f64| 2.0 + r + r * r / 2.0 + r * r * r / 6.0;
        let df = |r: f64| 1.0 + r + r * r / 2.0;
        let ddf = |r: f64| 1.0 + r;
        let t = WarpingFunction::tabulated(
            1.0,
            rs.clone(),
            rs.iter().map(|&r| f(r)).collect(),
            rs.iter().map(|&r| df(r)).collect(),
            rs.iter().map(|&r| ddf(r)).collect(),
        )
        .unwrap();
        for r in [1.1, 1.77, 2.5, 3.49] {
            let v = t.eval(r).unwrap();
            assert!((v.value - f(r)).abs() < 1e-12);
            assert!((v.first - df(r)).abs() < 1e-12);
            assert!((v.second - ddf(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn class_b_examples() {
        let f = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
        assert!(class_b_report(&f, (20.0, 40.0), 1e-6, 1e3).unwrap().verdict);

        let rs: Vec<f64> = (0..=400).map(|i| 10.0 + i as f64 * 0.1).collect();
        let lin = WarpingFunction::tabulated(
            1.0,
            rs.clone(),
            rs.clone(),
            vec![1.0; rs.len()],
            vec![0.0; rs.len()],
        )
        .unwrap();
        let rep = class_b_report(&lin, (20.0, 40.0), 1e-6, 1e3).unwrap();
        assert!(!rep.verdict);
        assert!((rep.sup_dev_second - 1.0).abs() < 1e-12);

        let c = WarpingFunction::cosh(2.0, 1.0, 0.0).unwrap();
        assert!(class_b_report(&c, (15.0, 30.0), 1e-6, 1e3).unwrap().verdict);
    }

    #[test]
    fn class_b_growth_floor() {
        // exp(0.1 r) on (1, 2) never exceeds the floor
        let f = WarpingFunction::exp(0.01, 1.0, 0.0).unwrap();
        let rep = class_b_report(&f, (1.0, 2.0), 1e-6, 1e3).unwrap();
        assert!(rep.sup_dev_first < 1e-15 && rep.sup_dev_second == 0.0);
        assert!(!rep.verdict);
    }

    #[test]
    fn class_b_window_validation() {
        let f = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
        assert!(class_b_report(&f, (5.0, 4.0), 1e-6, 1e3).is_err());
        assert!(class_b_report(&f, (1.0, 4.0), 0.0, 1e3).is_err());
        let p = integrate_perturbed(1.0, &Potential::Zero, (0.0, 1.0), (0.0, 10.0), 0.01).unwrap();
        assert!(matches!(class_b_report(&p, (5.0, 20.0), 1e-6, 1e3), Err(LabError::OutOfDomain { .. })));
    }

    #[test]
    fn perturbed_reproduces_sinh_and_exp() {
        let f = integrate_perturbed(1.0, &Potential::Zero, (0.0, 1.0), (0.0, 10.0), 0.01).unwrap();
        let v = f.eval(10.0).unwrap();
        assert!(close(v.value, 10f64.sinh(), 1e-6));
        let g = integrate_perturbed(4.0, &Potential::Zero, (1.0, 2.0), (0.0, 5.0), 0.005).unwrap();
        assert!(((g.eval(5.0).unwrap().value - 10f64.exp()) / 10f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn perturbed_ode_residual_at_nodes() {
        let q = Potential::ExpDecay { amplitude: 1.0, rate: 1.0 };
        let f = integrate_perturbed(1.0, &q, (0.0, 1.0), (0.0, 30.0), 0.01).unwrap();
        assert!(ode_residual(&f).unwrap() < 1e-12);
        let d = f.log_derivatives(10.0).unwrap();
        assert!((d.d2 - (1.0 + (-10f64).exp())).abs() < 1e-8);
        assert_eq!(f.family(), Family::PerturbedOde);
        let rep = class_b_report(&f, (20.0, 30.0), 1e-6, 1e3).unwrap();
        assert!(rep.verdict, "{rep:?}");
    }

    #[test]
    fn step_control_and_overflow() {
        let q = Potential::Zero;
        assert!(matches!(
            integrate_perturbed(1.0, &q, (0.0, 1.0), (0.0, 10.0), 1.0),
            Err(LabError::StepTooLarge { .. })
        ));
        assert!(matches!(
            integrate_perturbed(100.0, &q, (1.0, 10.0), (0.0, 80.0), 0.001),
            Err(LabError::Overflow { .. })
        ));
        assert!(integrate_perturbed(1.0, &q, (0.0, 0.0), (0.0, 1.0), 0.1).is_err());
        assert!(integrate_perturbed(1.0, &q, (-1.0, 0.0), (0.0, 1.0), 0.1).is_err());
    }

    #[test]
    fn potential_json_shape() {
        let p: Potential = serde_json::from_str(r#"{"kind":"exp_decay","rate":1.0}"#).unwrap();
        assert_eq!(p, Potential::ExpDecay { amplitude: 1.0, rate: 1.0 });
        assert!(serde_json::from_str::<Potential>(r#"{"kind":"exp_decay","rate":1.0,"x":2}"#).is_err());
    }

    #[test]
    fn hartman_exponential_closed_form() {
        let grid = SampleGrid { lo: 0.0, hi: 20.0, count: 41 };
        let rep = hartman_check(|t: f64| (-t).exp(), 1.0, 0.0, &grid).unwrap();
        for (t, g) in rep.t.iter().zip(&rep.scaled_values) {
            // e^{2t} · e^{-3t}/3
            let exact = (-t).exp() / 3.0;
            assert!((g - exact).abs() <= 1e-10 * exact, "t={t}");
        }
        assert!((rep.q_values[2] - (-3.0f64).exp() / 3.0).abs() < 1e-12);
        assert!(rep.all_ok());
    }

    #[test]
    fn hartman_zero_potential() {
        let grid = SampleGrid { lo: 0.0, hi: 10.0, count: 11 };
        let rep = hartman_check(|_| 0.0, 0.5, 0.0, &grid).unwrap();
        assert!(rep.all_ok());
        assert!(rep.q_values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hartman_inverse_square() {
        let grid = SampleGrid { lo: 1.0, hi: 100.0, count: 100 };
        let rep = hartman_check(|t: f64| 1.0 / (1.0 + t * t), 1.0, 1.0, &grid).unwrap();
        assert!(rep.ratio_bound_ok);
        assert!(rep.all_ok(), "{:?}", rep.tail_power);
    }

    #[test]
    fn hartman_rejects_slow_decay() {
        // 1/t is not integrable: the tail exponent sits at −1.
        let grid = SampleGrid { lo: 1.0, hi: 200.0, count: 200 };
        let rep = hartman_check(|t: f64| 1.0 / t, 1.0, 1.0, &grid).unwrap();
        assert!(rep.ratio_bound_ok);
        assert!(!rep.integrability_ok);
        assert!(rep.square_integrability_ok);
    }

    #[test]
    fn hartman_growing_potential_tail() {
        let grid = SampleGrid { lo: 0.0, hi: 5.0, count: 6 };
        let err = hartman_check(|t: f64| (3.0 * t).exp(), 1.0, 0.0, &grid).unwrap_err();
        assert!(matches!(err, LabError::TailNotNegligible { .. }));
    }
}
