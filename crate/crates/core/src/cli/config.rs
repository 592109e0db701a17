//! Strict JSON run configurations, one block per subcommand.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eigenforms::{AngularData, ChiConstants, Mode};
use crate::warping::{integrate_perturbed, Potential, SampleGrid, WarpingFunction};
use crate::Result as LabResult;

/// A configuration problem detected after JSON parsing succeeded.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// An exponent in `[1, ∞]`; `"inf"` selects `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Named(InfTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InfTag {
    #[serde(rename = "inf")]
    Inf,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Named(InfTag::Inf) => f64::INFINITY,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn zero() -> f64 {
    0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WarpingConfig {
    Exp {
        a0: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "zero")]
        c0: f64,
    },
    Sinh {
        a0: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "zero")]
        c0: f64,
    },
    Cosh {
        a0: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "zero")]
        c0: f64,
    },
    Perturbed {
        a0: f64,
        q: Potential,
        init: (f64, f64),
        r_span: (f64, f64),
        step: f64,
    },
    Tabulated {
        a0: f64,
        r: Vec<f64>,
        f: Vec<f64>,
        df: Vec<f64>,
        ddf: Vec<f64>,
    },
}

impl WarpingConfig {
    pub fn build(&self) -> LabResult<WarpingFunction> {
        match self {
            WarpingConfig::Exp { a0, c, c0 } => WarpingFunction::exp(*a0, *c, *c0),
            WarpingConfig::Sinh { a0, c, c0 } => WarpingFunction::sinh(*a0, *c, *c0),
            WarpingConfig::Cosh { a0, c, c0 } => WarpingFunction::cosh(*a0, *c, *c0),
            WarpingConfig::Perturbed { a0, q, init, r_span, step } => {
                integrate_perturbed(*a0, q, *init, *r_span, *step)
            }
            WarpingConfig::Tabulated { a0, r, f, df, ddf } => {
                WarpingFunction::tabulated(*a0, r.clone(), f.clone(), df.clone(), ddf.clone())
            }
        }
    }

    pub fn a0(&self) -> f64 {
        match self {
            WarpingConfig::Exp { a0, .. }
            | WarpingConfig::Sinh { a0, .. }
            | WarpingConfig::Cosh { a0, .. }
            | WarpingConfig::Perturbed { a0, .. }
            | WarpingConfig::Tabulated { a0, .. } => *a0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RegionMode {
    #[default]
    Warped,
    Quotient,
}

/// `n`, `k`, `p`, `a0`, or `N`, `k`, `p` in quotient mode (`n = N + 1`, `a0 = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    #[serde(default)]
    pub mode: RegionMode,
    pub n: Option<u32>,
    #[serde(rename = "N")]
    pub big_n: Option<u32>,
    pub k: u32,
    pub p: Exponent,
    pub a0: Option<f64>,
    #[serde(default)]
    pub canonicalize: bool,
    #[serde(default)]
    pub eigenvalues: Vec<f64>,
    #[serde(default = "default_s_range")]
    pub s_range: (f64, f64),
    #[serde(default = "default_curve_samples")]
    pub samples: usize,
}

fn default_s_range() -> (f64, f64) {
    (-5.0, 5.0)
}

fn default_curve_samples() -> usize {
    201
}

/// Resolves `(n, a0)` from either warped or quotient parameters.
pub fn resolve_dimension(
    mode: RegionMode,
    n: Option<u32>,
    big_n: Option<u32>,
    a0: Option<f64>,
) -> anyhow::Result<(u32, f64)> {
    match mode {
        RegionMode::Warped => {
            if big_n.is_some() {
                return Err(config_error("\"N\" is only valid with \"mode\": \"quotient\""));
            }
            let n = n.ok_or_else(|| config_error("missing \"n\""))?;
            Ok((n, a0.unwrap_or(1.0)))
        }
        RegionMode::Quotient => {
            if n.is_some() {
                return Err(config_error("quotient mode takes \"N\", not \"n\""));
            }
            if a0.is_some_and(|a| a != 1.0) {
                return Err(config_error("quotient mode fixes a0 = 1"));
            }
            let big_n = big_n.ok_or_else(|| config_error("missing \"N\""))?;
            Ok((big_n + 1, 1.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiConfig {
    pub lap: f64,
    pub grad: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualConfig {
    pub warping: WarpingConfig,
    #[serde(default)]
    pub mode: Mode,
    pub n: Option<u32>,
    #[serde(rename = "N")]
    pub big_n: Option<u32>,
    pub k: u32,
    pub p: f64,
    #[serde(default)]
    pub lambda0: f64,
    #[serde(default)]
    pub s: Vec<f64>,
    pub schedule: Vec<(f64, f64)>,
    #[serde(default = "one")]
    pub eta_norm_const: f64,
    pub chi: Option<ChiConfig>,
}

impl ResidualConfig {
    pub fn dimension(&self) -> anyhow::Result<u32> {
        match (self.mode, self.n, self.big_n) {
            (_, Some(n), None) => Ok(n),
            (Mode::Hyperbolic, None, Some(big_n)) => Ok(big_n + 1),
            (Mode::Warped, None, Some(_)) => Err(config_error("\"N\" is only valid in hyperbolic mode")),
            (_, Some(_), Some(_)) => Err(config_error("give either \"n\" or \"N\", not both")),
            (_, None, None) => Err(config_error("missing \"n\"")),
        }
    }

    pub fn angular(&self) -> AngularData {
        AngularData {
            eta_norm_const: self.eta_norm_const,
            chi: self.chi.map(|c| ChiConstants { lap: c.lap, grad: c.grad, lower: c.lower, upper: c.upper }),
        }
    }

    pub fn s_values(&self) -> Vec<f64> {
        if self.s.is_empty() {
            vec![0.0]
        } else {
            self.s.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeConfig {
    pub a0: f64,
    #[serde(default)]
    pub eps: f64,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(default)]
    pub s: f64,
    pub t: Option<f64>,
    pub n: u32,
    pub r_max: f64,
    pub step: Option<f64>,
    pub window: Option<(f64, f64)>,
    #[serde(default)]
    pub ratio_radii: Vec<f64>,
    #[serde(default = "default_csv_rows")]
    pub csv_rows: usize,
}

fn default_csv_rows() -> usize {
    2001
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatKernelConfig {
    #[serde(rename = "K2")]
    pub k2: f64,
    pub t: f64,
    pub scalar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureConfig {
    pub warping: WarpingConfig,
    pub n: u32,
    pub sec_n: (f64, f64),
    pub r_range: (f64, f64),
    #[serde(default = "default_profile_samples")]
    pub samples: usize,
    #[serde(default)]
    pub conformal_x: Vec<f64>,
    pub heat_kernel: Option<HeatKernelConfig>,
}

fn default_profile_samples() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HartmanConfig {
    pub q: Potential,
    pub lambda: f64,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub grid: SampleGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassBConfig {
    pub warping: WarpingConfig,
    pub tail_window: (f64, f64),
    #[serde(default = "default_classb_tol")]
    pub tol: f64,
    #[serde(default = "default_growth_floor")]
    pub growth_floor: f64,
    #[serde(default = "default_classb_samples")]
    pub samples: usize,
    pub hartman: Option<HartmanConfig>,
}

fn default_classb_tol() -> f64 {
    1e-6
}

fn default_growth_floor() -> f64 {
    crate::warping::DEFAULT_GROWTH_FLOOR
}

fn default_classb_samples() -> usize {
    crate::warping::CLASS_B_MIN_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(rename = "N")]
    pub big_n: u32,
    pub k: u32,
    pub p: Exponent,
    #[serde(default)]
    pub canonicalize: bool,
    #[serde(default)]
    pub eigenvalues: Vec<f64>,
    #[serde(default)]
    pub queries: Vec<(f64, f64)>,
    /// CSV file of `re,im` rows, resolved relative to the config file.
    pub query_file: Option<String>,
    #[serde(default = "default_membership_tol")]
    pub tol: f64,
}

fn default_membership_tol() -> f64 {
    crate::regions::DEFAULT_MEMBERSHIP_TOL
}

/// Parses a config block; unknown keys and malformed values are config errors.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> anyhow::Result<T> {
    serde_json::from_str(text).map_err(|e| config_error(e.to_string()))
}
