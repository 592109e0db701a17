//! C interface to `lpspectra`.
//!
//! Objects are exposed as opaque handles created by `*_new` and released by
//! the matching `*_free`. Every fallible call returns an [`LpStatus`]; on
//! failure [`lp_last_error`] describes what went wrong on the calling thread.
//! Outputs are written through caller-provided pointers only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lpspectra::eigenforms::{make_cutoff, residual_terms, AngularData, Mode};
use lpspectra::radialop::{candidate_lambda, mu_for, OperatorContext};
use lpspectra::regions::{assemble_spectrum, curve_point, essential_bottom, region_params, ParabolicRegion, SpectralParams, SpectrumModel};
use lpspectra::warping::WarpingFunction;
use lpspectra::{Complex64, ErrorClass, LabError};

/// Result of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Parameters violate a precondition.
    InvalidArgument = 2,
    /// A degree or domain guard fired.
    DomainGuard = 3,
    /// Residual ratios failed to decay.
    NotDecaying = 4,
    /// Overflow, step control or quadrature failure.
    Numeric = 5,
    /// An internal panic was caught at the boundary.
    Internal = 6,
}

impl From<&LabError> for LpStatus {
    fn from(err: &LabError) -> Self {
        match err.class() {
            ErrorClass::Config => LpStatus::InvalidArgument,
            ErrorClass::DomainGuard => LpStatus::DomainGuard,
            ErrorClass::Decay => LpStatus::NotDecaying,
            ErrorClass::Numeric => LpStatus::Numeric,
        }
    }
}

/// Closed-form warping families available through the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpFamily {
    Exp = 0,
    Sinh = 1,
    Cosh = 2,
}

/// Opaque warping function.
pub struct LpWarping(WarpingFunction);

/// Opaque parabolic spectral region.
pub struct LpRegion(ParabolicRegion);

/// Opaque spectrum of a hyperbolic quotient.
pub struct LpSpectrum(SpectrumModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

enum Failure {
    Null(&'static str),
    Lab(LabError),
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Lab(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            LpStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer passed for `{what}`"));
            LpStatus::NullPointer
        }
        Ok(Err(Failure::Lab(e))) => {
            set_error(&e.to_string());
            LpStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic");
            LpStatus::Internal
        }
    }
}

fn nonnull<T>(p: *mut T, what: &'static str) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(Failure::Null(what))
    } else {
        Ok(p)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

/// Message for the last failed call on this thread, or an empty string.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates `f(r) = c·g(√a0·r)` with `g` the chosen family, defined for `r ≥ c0`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_warping_new(family: LpFamily, a0: f64, c: f64, c0: f64, out: *mut *mut LpWarping) -> LpStatus {
    guard(|| {
        let out = nonnull(out, "out")?;
        let f = match family {
            LpFamily::Exp => WarpingFunction::exp(a0, c, c0),
            LpFamily::Sinh => WarpingFunction::sinh(a0, c, c0),
            LpFamily::Cosh => WarpingFunction::cosh(a0, c, c0),
        }?;
        *out = Box::into_raw(Box::new(LpWarping(f)));
        Ok(())
    })
}

/// # Safety
/// `w` must be null or a handle from [`lp_warping_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lp_warping_free(w: *mut LpWarping) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// `f(r)`, `f'(r)`, `f''(r)`.
///
/// # Safety
/// `w` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_warping_eval(
    w: *const LpWarping,
    r: f64,
    value: *mut f64,
    first: *mut f64,
    second: *mut f64,
) -> LpStatus {
    guard(|| {
        let f = handle(w, "w")?;
        let (value, first, second) = (nonnull(value, "value")?, nonnull(first, "first")?, nonnull(second, "second")?);
        let v = f.0.eval(r)?;
        *value = v.value;
        *first = v.first;
        *second = v.second;
        Ok(())
    })
}

/// `ln f`, `f'/f` and `f''/f`, finite even where `f` itself overflows.
///
/// # Safety
/// `w` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_warping_log_derivatives(
    w: *const LpWarping,
    r: f64,
    ln_f: *mut f64,
    d1: *mut f64,
    d2: *mut f64,
) -> LpStatus {
    guard(|| {
        let f = handle(w, "w")?;
        let (ln_f, d1, d2) = (nonnull(ln_f, "ln_f")?, nonnull(d1, "d1")?, nonnull(d2, "d2")?);
        let d = f.0.log_derivatives(r)?;
        *ln_f = d.ln_f;
        *d1 = d.d1;
        *d2 = d.d2;
        Ok(())
    })
}

/// Region for dimension `n`, degree `k ≤ n/2`, exponent `p` (`INFINITY` allowed) and scale `a0`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_region_new(n: u32, k: u32, p: f64, a0: f64, out: *mut *mut LpRegion) -> LpStatus {
    guard(|| {
        let out = nonnull(out, "out")?;
        let region = region_params(&SpectralParams::new(n, k, p, a0)?)?;
        *out = Box::into_raw(Box::new(LpRegion(region)));
        Ok(())
    })
}

/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lp_region_free(region: *mut LpRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// Vertex on the real axis and half width of the imaginary strip.
///
/// # Safety
/// `region` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_region_shape(region: *const LpRegion, vertex: *mut f64, half_width: *mut f64) -> LpStatus {
    guard(|| {
        let r = handle(region, "region")?;
        let (vertex, half_width) = (nonnull(vertex, "vertex")?, nonnull(half_width, "half_width")?);
        *vertex = r.0.vertex;
        *half_width = r.0.im_half_width;
        Ok(())
    })
}

/// Whether `re + i·im` lies within distance `tol` of the region.
///
/// # Safety
/// `region` must be a live handle; `inside` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_region_contains(
    region: *const LpRegion,
    re: f64,
    im: f64,
    tol: f64,
    inside: *mut bool,
) -> LpStatus {
    guard(|| {
        let r = handle(region, "region")?;
        let inside = nonnull(inside, "inside")?;
        *inside = r.0.contains(Complex64::new(re, im), tol);
        Ok(())
    })
}

/// Euclidean distance from `re + i·im` to the region.
///
/// # Safety
/// `region` must be a live handle; `distance` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_region_distance(region: *const LpRegion, re: f64, im: f64, distance: *mut f64) -> LpStatus {
    guard(|| {
        let r = handle(region, "region")?;
        let distance = nonnull(distance, "distance")?;
        *distance = r.0.distance(Complex64::new(re, im));
        Ok(())
    })
}

/// Point of the boundary curve at parameter `s`.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_curve_point(
    n: u32,
    k: u32,
    p: f64,
    a0: f64,
    s: f64,
    re: *mut f64,
    im: *mut f64,
) -> LpStatus {
    guard(|| {
        let (re, im) = (nonnull(re, "re")?, nonnull(im, "im")?);
        let z = curve_point(&SpectralParams::new(n, k, p, a0)?, s);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Eigenvalue candidate for the radial exponent chosen from `(p, s)`.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_candidate_lambda(
    n: u32,
    k: u32,
    p: f64,
    a0: f64,
    lambda0: f64,
    s: f64,
    re: *mut f64,
    im: *mut f64,
) -> LpStatus {
    guard(|| {
        let (re, im) = (nonnull(re, "re")?, nonnull(im, "im")?);
        if !(p >= 1.0 && p.is_finite()) {
            return Err(LabError::InvalidParameter(format!("exponent p = {p} must be finite and >= 1")).into());
        }
        let ctx = OperatorContext::new(n, k, lambda0, a0)?;
        let z = candidate_lambda(mu_for(p, k, n, s), &ctx);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Bottom of the essential spectrum; `volume_dependent` is set when it
/// depends on whether the volume is infinite.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_essential_bottom(
    k: u32,
    n: u32,
    a0: f64,
    infinite_volume: bool,
    bottom: *mut f64,
    volume_dependent: *mut bool,
) -> LpStatus {
    guard(|| {
        let (bottom, flag) = (nonnull(bottom, "bottom")?, nonnull(volume_dependent, "volume_dependent")?);
        let (b, f) = essential_bottom(k, n, a0, infinite_volume);
        *bottom = b;
        *flag = f;
        Ok(())
    })
}

/// Spectrum of a quotient of hyperbolic `(N+1)`-space with the given real eigenvalues.
///
/// # Safety
/// `eigenvalues` must point to `count` doubles (or be null with `count == 0`);
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_spectrum_new(
    big_n: u32,
    k: u32,
    p: f64,
    eigenvalues: *const f64,
    count: usize,
    out: *mut *mut LpSpectrum,
) -> LpStatus {
    guard(|| {
        let out = nonnull(out, "out")?;
        let eigs: &[f64] = if count == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(handle(eigenvalues, "eigenvalues")?, count)
        };
        let model = assemble_spectrum(&SpectralParams::hyperbolic_quotient(big_n, k, p)?, eigs)?;
        *out = Box::into_raw(Box::new(LpSpectrum(model)));
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lp_spectrum_free(spectrum: *mut LpSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// # Safety
/// `spectrum` must be a live handle; `member` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_spectrum_contains(
    spectrum: *const LpSpectrum,
    re: f64,
    im: f64,
    tol: f64,
    member: *mut bool,
) -> LpStatus {
    guard(|| {
        let m = handle(spectrum, "spectrum")?;
        let member = nonnull(member, "member")?;
        *member = m.0.contains(Complex64::new(re, im), tol);
        Ok(())
    })
}

/// Residual ratios of the approximate eigenform cut off to `[a, b]`.
///
/// `ratio` is the bound assembled from the residual terms, `direct_ratio`
/// the ratio computed from the pointwise residual. Unit angular constants.
///
/// # Safety
/// `w` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lp_residual_ratio(
    w: *const LpWarping,
    n: u32,
    k: u32,
    p: f64,
    lambda0: f64,
    s: f64,
    a: f64,
    b: f64,
    ratio: *mut f64,
    direct_ratio: *mut f64,
) -> LpStatus {
    guard(|| {
        let f = handle(w, "w")?;
        let (ratio, direct_ratio) = (nonnull(ratio, "ratio")?, nonnull(direct_ratio, "direct_ratio")?);
        let ctx = OperatorContext::new(n, k, lambda0, f.0.a0())?;
        let phi = make_cutoff(a, b)?;
        if !(p >= 1.0 && p.is_finite()) {
            return Err(LabError::InvalidParameter(format!("exponent p = {p} must be finite and >= 1")).into());
        }
        let bd = residual_terms(&f.0, &phi, mu_for(p, k, n, s), p, &ctx, &AngularData::default(), Mode::Warped)?;
        *ratio = bd.ratio;
        *direct_ratio = bd.direct_ratio;
        Ok(())
    })
}
