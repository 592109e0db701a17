//! Parabolic spectral regions in the complex plane.
//!
//! A region is `{vertex + z² : |Im z| ≤ w}`. Writing `λ − vertex = u + iv`,
//! the boundary is the parabola `v² = 4w²(u + w²)` and the interior is where
//! `v² < 4w²(u + w²)`. For `w = 0` the region collapses onto the ray
//! `[vertex, ∞)`.

use num_complex::Complex64;

use crate::error::{LabError, Result};

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Dimension `n`, form degree `k`, exponent `p ∈ [1, ∞]` and curvature scale `a0`.
///
/// `p = ∞` is stored as `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    pub n: u32,
    pub k: u32,
    pub p: f64,
    pub a0: f64,
}

impl SpectralParams {
    pub fn new(n: u32, k: u32, p: f64, a0: f64) -> Result<Self> {
        let params = Self { n, k, p, a0 };
        params.validate()?;
        Ok(params)
    }

    /// Parameters of a quotient of hyperbolic `(N+1)`-space: `n = N + 1`, `a0 = 1`.
    pub fn hyperbolic_quotient(big_n: u32, k: u32, p: f64) -> Result<Self> {
        Self::new(big_n + 1, k, p, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(LabError::invalid(format!("dimension n = {} must be at least 2", self.n)));
        }
        if self.k > self.n {
            return Err(LabError::invalid(format!("degree k = {} exceeds n = {}", self.k, self.n)));
        }
        if !(self.p >= 1.0) {
            return Err(LabError::invalid(format!("exponent p = {} must lie in [1, inf]", self.p)));
        }
        if !(self.a0 > 0.0 && self.a0.is_finite()) {
            return Err(LabError::invalid(format!("a0 = {} must be positive", self.a0)));
        }
        Ok(())
    }

    fn inv_p(&self) -> f64 {
        if self.p.is_infinite() {
            0.0
        } else {
            1.0 / self.p
        }
    }

    /// `(n−1)(1/p − 1/2)`, the signed imaginary offset of the curve in `z`.
    fn offset(&self) -> f64 {
        (self.n as f64 - 1.0) * (self.inv_p() - 0.5)
    }

    fn center(&self) -> f64 {
        (self.n as f64 - 1.0) / 2.0 - self.k as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicRegion {
    pub vertex: f64,
    pub im_half_width: f64,
    pub params: SpectralParams,
}

impl ParabolicRegion {
    /// Leftmost real point, `vertex − w²`.
    pub fn real_minimum(&self) -> f64 {
        self.vertex - self.im_half_width * self.im_half_width
    }

    /// Point `vertex + (x + i w)²` of the boundary parabola (upper sign).
    pub fn boundary_point(&self, x: f64) -> Complex64 {
        self.vertex + Complex64::new(x, self.im_half_width).powi(2)
    }

    /// Euclidean distance from `λ` to the closed region.
    pub fn distance(&self, lambda: Complex64) -> f64 {
        distance_to_region(lambda - self.vertex, self.im_half_width)
    }

    pub fn contains(&self, lambda: Complex64, tol: f64) -> bool {
        contains(self, lambda, tol)
    }
}

/// `−a0 ((n−1)/p − k + is)((n−1)(1/p − 1) + k + is)`
pub fn curve_point(params: &SpectralParams, s: f64) -> Complex64 {
    let n1 = params.n as f64 - 1.0;
    let k = params.k as f64;
    let ip = params.inv_p();
    let left = Complex64::new(n1 * ip - k, s);
    let right = Complex64::new(n1 * (ip - 1.0) + k, s);
    -params.a0 * left * right
}

pub fn region_params(params: &SpectralParams) -> Result<ParabolicRegion> {
    params.validate()?;
    if 2 * params.k > params.n {
        return Err(LabError::DegreeNotCanonical { k: params.k, n: params.n });
    }
    // |1/p − 1/2| is invariant under p ↦ p*, so p = ∞ reads off p* = 1.
    let params_eff = if params.p.is_infinite() {
        SpectralParams { p: dual_exponent(params.p), ..*params }
    } else {
        *params
    };
    let c = params_eff.center();
    Ok(ParabolicRegion {
        vertex: params.a0 * c * c,
        im_half_width: params.a0.sqrt() * params_eff.offset().abs(),
        params: *params,
    })
}

/// Real roots of `x³ + a x + b = 0`.
fn depressed_cubic_roots(a: f64, b: f64) -> Vec<f64> {
    let disc = (b / 2.0).powi(2) + (a / 3.0).powi(3);
    let mut roots = if disc > 0.0 {
        let sq = disc.sqrt();
        vec![(-b / 2.0 + sq).cbrt() + (-b / 2.0 - sq).cbrt()]
    } else if a == 0.0 {
        vec![0.0]
    } else {
        let m = 2.0 * (-a / 3.0).sqrt();
        let arg = (3.0 * b / (a * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|j| m * (theta - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos())
            .collect()
    };
    // polish: the trigonometric and Cardano forms lose digits near double roots
    for x in roots.iter_mut() {
        for _ in 0..3 {
            let f = *x * *x * *x + a * *x + b;
            let df = 3.0 * *x * *x + a;
            if df.abs() < 1e-300 {
                break;
            }
            let next = *x - f / df;
            if next.is_finite() {
                *x = next;
            }
        }
    }
    roots
}

/// Distance from `ζ = u + iv` to `{z² : |Im z| ≤ w}`.
fn distance_to_region(zeta: Complex64, w: f64) -> f64 {
    let (u, v) = (zeta.re, zeta.im);
    if w == 0.0 {
        return if u >= 0.0 { v.abs() } else { zeta.norm() };
    }
    if v * v <= 4.0 * w * w * (u + w * w) {
        return 0.0;
    }
    // Nearest point (x² − w², 2xw) on the boundary: the stationarity
    // condition is x³ + (w² − u) x − w v = 0.
    depressed_cubic_roots(w * w - u, -w * v)
        .into_iter()
        .map(|x| (Complex64::new(x * x - w * w, 2.0 * x * w) - zeta).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Whether some `z` with `|Im z| ≤ w` has `|vertex + z² − λ| ≤ tol`.
pub fn contains(region: &ParabolicRegion, lambda: Complex64, tol: f64) -> bool {
    region.distance(lambda) <= tol.max(0.0)
}

pub fn canonical_degree(k: u32, n: u32) -> u32 {
    k.min(n.saturating_sub(k))
}

/// Hölder conjugate, with `1 ↔ ∞`.
pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Checks that the curves `P_{q,k}` for `q ∈ [p, 2]` sweep out the region for `p`.
///
/// (a) Curve points sampled over `q ∈ [p, 2]`, `s ∈ [−S, S]` all lie in the
/// region. (b) Boundary and interior lines of the region, sampled densely,
/// are each hit by a curve: every sample is inverted to `(q, s)`, and the
/// check requires `q ∈ [p, 2]` and `curve_point(q, s)` within `tol`.
pub fn union_identity_check(
    p: f64,
    k: u32,
    n: u32,
    a0: f64,
    q_samples: usize,
    s_samples: usize,
    tol: f64,
) -> bool {
    const S_RANGE: f64 = 10.0;
    if !(1.0..=2.0).contains(&p) || q_samples < 1 || s_samples < 2 {
        return false;
    }
    let Ok(params) = SpectralParams::new(n, k, p, a0) else { return false };
    let Ok(region) = region_params(&params) else { return false };

    let qs: Vec<f64> = if q_samples == 1 {
        vec![p]
    } else {
        (0..q_samples).map(|i| p + (2.0 - p) * i as f64 / (q_samples - 1) as f64).collect()
    };
    let ss: Vec<f64> = (0..s_samples)
        .map(|j| -S_RANGE + 2.0 * S_RANGE * j as f64 / (s_samples - 1) as f64)
        .collect();

    let covered = qs.iter().all(|&q| {
        let pq = SpectralParams { p: q, ..params };
        ss.iter().all(|&s| contains(&region, curve_point(&pq, s), tol))
    });
    if !covered {
        return false;
    }

    let sa = a0.sqrt();
    let n1 = n as f64 - 1.0;
    let w = region.im_half_width;
    let x_max = S_RANGE * sa;
    let lines = q_samples.max(2);
    (0..lines).all(|li| {
        let height = w * li as f64 / (lines - 1) as f64;
        (0..s_samples).all(|j| {
            let x = -x_max + 2.0 * x_max * j as f64 / (s_samples - 1) as f64;
            for sign in [1.0, -1.0] {
                let lambda = region.vertex + Complex64::new(x, sign * height).powi(2);
                let mut z = (lambda - region.vertex).sqrt();
                if z.im < 0.0 {
                    z = -z;
                }
                let d = z.im / sa;
                let q = 1.0 / (d / n1 + 0.5);
                let s = -z.re / sa;
                if !(q >= p - 1e-12 && q <= 2.0 + 1e-12) {
                    return false;
                }
                let pq = SpectralParams { p: q.clamp(p, 2.0), ..params };
                if (curve_point(&pq, s) - lambda).norm() > tol {
                    return false;
                }
            }
            true
        })
    })
}

/// Bottom of the essential spectrum on `k`-forms and whether 0 is an
/// eigenvalue of infinite multiplicity (middle degree, infinite volume).
pub fn essential_bottom(k: u32, n: u32, a0: f64, infinite_volume: bool) -> (f64, bool) {
    let (k, n) = (k as f64, n as f64);
    if 2.0 * k < n {
        (a0 * (n - 2.0 * k - 1.0).powi(2) / 4.0, false)
    } else if 2.0 * k > n {
        (a0 * (n - 2.0 * k + 1.0).powi(2) / 4.0, false)
    } else {
        (a0 / 4.0, infinite_volume)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumModel {
    pub region: ParabolicRegion,
    pub isolated_eigenvalues: Vec<f64>,
    pub params: SpectralParams,
}

impl SpectrumModel {
    pub fn contains(&self, lambda: Complex64, tol: f64) -> bool {
        self.region.contains(lambda, tol)
            || self.isolated_eigenvalues.iter().any(|&e| (lambda - e).norm() <= tol)
    }
}

/// Spectrum of a convex cocompact quotient of hyperbolic `(N+1)`-space:
/// the region `Q'_{p,k}` together with the given isolated eigenvalues.
pub fn assemble_spectrum(params: &SpectralParams, eigenvalues: &[f64]) -> Result<SpectrumModel> {
    params.validate()?;
    if params.a0 != 1.0 {
        return Err(LabError::invalid("quotient spectra are assembled with a0 = 1 and n = N + 1"));
    }
    if 2 * params.k == params.n {
        return Err(LabError::MiddleDegreeUnsupported { k: params.k, n: params.n });
    }
    if let Some(e) = eigenvalues.iter().find(|e| !e.is_finite()) {
        return Err(LabError::invalid(format!("eigenvalue {e} is not finite")));
    }
    let region = region_params(params)?;
    let mut isolated = eigenvalues.to_vec();
    isolated.sort_by(f64::total_cmp);
    Ok(SpectrumModel { region, isolated_eigenvalues: isolated, params: *params })
}
