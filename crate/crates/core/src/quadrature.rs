//! Adaptive Simpson quadrature.
//!
//! Tolerances are relative to the magnitude of the running estimate with an
//! absolute floor, so integrals that are identically zero terminate at once.

use std::cell::Cell;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_depth: u32,
    /// Cap on integrand evaluations per call.
    pub max_evals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_floor: 1e-14,
            max_depth: 48,
            max_evals: 2_000_000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]` by adaptive Simpson with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(LabError::Quadrature { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return adaptive_simpson(f, b, a, opts).map(|v| -v);
    }
    // Seed with four panels so a feature that hides between the first three
    // samples is still seen.
    let n_seed = 4;
    let h = (b - a) / n_seed as f64;
    let mut panels = Vec::with_capacity(n_seed);
    let mut coarse = 0.0;
    for i in 0..n_seed {
        let pa = a + h * i as f64;
        let pb = if i + 1 == n_seed { b } else { pa + h };
        let pm = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(pm), f(pb));
        let whole = simpson(pa, pb, fa, fm, fb);
        coarse += whole;
        panels.push(Panel { a: pa, b: pb, fa, fm, fb, whole });
    }
    if !coarse.is_finite() {
        return Err(LabError::Quadrature { a, b });
    }
    let tol = (opts.rel_tol * coarse.abs()).max(opts.abs_floor) / n_seed as f64;
    let budget = Budget { left: Cell::new(opts.max_evals) };
    let mut total = 0.0;
    for p in panels {
        total += refine(f, &p, tol, opts.max_depth, &budget)?;
    }
    Ok(total)
}

struct Budget {
    left: Cell<usize>,
}

fn refine<F: Fn(f64) -> f64>(f: &F, p: &Panel, tol: f64, depth: u32, budget: &Budget) -> Result<f64> {
    let left = budget.left.get();
    if left < 2 {
        return Err(LabError::Quadrature { a: p.a, b: p.b });
    }
    budget.left.set(left - 2);
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    if !delta.is_finite() {
        return Err(LabError::Quadrature { a: p.a, b: p.b });
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(LabError::Quadrature { a: p.a, b: p.b });
    }
    let lp = Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left };
    let rp = Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right };
    Ok(refine(f, &lp, 0.5 * tol, depth - 1, budget)? + refine(f, &rp, 0.5 * tol, depth - 1, budget)?)
}

/// Integrates over `[a, b]` split at geometrically growing offsets from `a`.
///
/// Integrands here concentrate near the left end of long intervals (tails
/// that decay away from the cutoff ramp), which a single coarse panel can
/// step over.
pub fn integrate_from_left<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let mut total = 0.0;
    let mut lo = a;
    let mut width = 1.0;
    while lo < b {
        let hi = (lo + width).min(b);
        total += adaptive_simpson(f, lo, hi, opts)?;
        lo = hi;
        width *= 2.0;
    }
    Ok(total)
}
