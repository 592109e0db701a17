//! Desk-scale numerics for the L^p spectrum of the Hodge Laplacian on
//! warped products `dr² + f(r)² g_N` and on convex cocompact hyperbolic
//! quotients.
//!
//! The modules build on each other roughly in this order:
//!
//! * [`warping`]: radial profiles `f`, class B checks, the perturbed ODE
//!   `f'' = (a0 + q) f` and the asymptotic-solution conditions on `q`.
//! * [`regions`]: the parabolic regions of the complex plane that make up
//!   the spectrum, with closed-form membership.
//! * [`radialop`]: the radial operator on profiles `φ f^μ`, analytic and
//!   finite-difference.
//! * [`eigenforms`]: cutoffs, norms and residuals of approximate eigenforms.
//! * [`volume`]: comparison solutions of `u'' + q u = 0` and volume growth.
//! * [`curvature`]: sectional curvatures of the warped metric, the
//!   conformal compactification factor and the heat-kernel bound.

pub mod curvature;
pub mod eigenforms;
pub mod error;
pub mod quadrature;
pub mod radialop;
pub mod regions;
pub mod volume;
pub mod warping;

#[doc(hidden)]
pub mod cli;

pub use error::{ErrorClass, LabError, Result};
pub use num_complex::Complex64;
