use thiserror::Error;

/// Everything that can go wrong inside the laboratory.
///
/// Variants are grouped by [`ErrorClass`] so that front ends (the CLI, the C
/// bindings) can map them onto stable exit or status codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("r = {r} is outside the evaluable domain [{lo}, {hi}]")]
    OutOfDomain { r: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree k = {k} exceeds n/2 for n = {n}; canonicalize first")]
    DegreeNotCanonical { k: u32, n: u32 },

    #[error("degree k = {k} is the middle degree (N+1)/2 for n = {n}")]
    MiddleDegreeUnsupported { k: u32, n: u32 },

    #[error("cutoff interval requires B > A, got A = {a}, B = {b}")]
    InvalidInterval { a: f64, b: f64 },

    #[error("grid has {m} nodes, at least 5 are required")]
    GridTooCoarse { m: usize },

    #[error("Re mu = {re_mu} differs from the cancelling value {expected}")]
    WeightMismatch { re_mu: f64, expected: f64 },

    #[error("hyperbolic mode requires a sinh warping function with a0 = 1")]
    ModeMismatch,

    #[error("breakpoint {at} is not a grid node for step {step}")]
    BreakpointMisaligned { at: f64, step: f64 },

    #[error("fit window length {len} is below the minimum of 5")]
    WindowTooShort { len: f64 },

    #[error("residual ratios do not decay: first {first}, last {last}")]
    NotDecaying { first: f64, last: f64 },

    #[error("local error estimate {estimate:e} at r = {r} exceeds tolerance {tol:e}")]
    StepTooLarge { r: f64, estimate: f64, tol: f64 },

    #[error("solution overflowed at r = {r}; rescale the initial data")]
    Overflow { r: f64 },

    #[error("truncated tail bound {bound:e} at t = {t} is not negligible")]
    TailNotNegligible { t: f64, bound: f64 },

    #[error("quadrature on [{a}, {b}] did not converge")]
    Quadrature { a: f64, b: f64 },
}

/// Coarse failure classes shared by the CLI exit codes and the FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: parameters violate a precondition.
    Config,
    /// A degree or domain guard fired (duality must be applied explicitly).
    DomainGuard,
    /// A decay sweep failed to decay.
    Decay,
    /// The numerics broke down (overflow, step control, quadrature).
    Numeric,
}

impl LabError {
    pub fn class(&self) -> ErrorClass {
        use LabError::*;
        match self {
            InvalidParameter(_)
            | InvalidInterval { .. }
            | GridTooCoarse { .. }
            | WindowTooShort { .. }
            | BreakpointMisaligned { .. }
            | ModeMismatch => ErrorClass::Config,
            OutOfDomain { .. }
            | DegreeNotCanonical { .. }
            | MiddleDegreeUnsupported { .. }
            | WeightMismatch { .. } => ErrorClass::DomainGuard,
            NotDecaying { .. } => ErrorClass::Decay,
            StepTooLarge { .. } | Overflow { .. } | TailNotNegligible { .. } | Quadrature { .. } => {
                ErrorClass::Numeric
            }
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
