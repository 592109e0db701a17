//! Command-line front end of the `lpspectra` binary.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::ErrorClass;
use crate::LabError;
use config::ConfigError;
use output::{now_stamp, read_text, Emitter, IoFailure};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_DECAY: u8 = 4;
pub const EXIT_NUMERIC: u8 = 5;
pub const EXIT_IO: u8 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "lpspectra",
    version,
    about = "Spectral regions, approximate eigenforms, volume growth and curvature of warped products",
    after_help = "Exit codes: 0 ok, 2 config error, 3 domain guard, 4 residuals not decaying, \
                  5 numerical failure, 6 I/O error.\nEvery run writes manifest.json next to its outputs."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON config file for the subcommand
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing)
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Omit timestamps from the manifest and SVG files
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Worker threads for parallel sweeps (0 = one per core)
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Boundary curve and filled region in the complex plane.
    ///
    /// region_boundary.csv: s, re, im (boundary curve point at parameter s).
    /// region.svg: filled region with vertex and eigenvalue markers.
    Region,
    /// Residual sweep of the approximate eigenforms.
    ///
    /// residual_sweep.csv: A, B, s, I, II, III, IV, V, A1, A2, A3 (p-th powers of the
    /// residual terms; A1..A3 empty outside hyperbolic mode), direct_residual, norm,
    /// ratio (bound from the terms), direct_ratio (pointwise residual).
    /// decay.svg: log-log ratio against B - A. Exits 4 when the ratios do not decay.
    Residual,
    /// Sturm comparison solution, bounds and volume growth rate.
    ///
    /// volume.csv: r, u, log_volume_integral (natural log of the integral of u^(n-1)
    /// from 0 to r), thinned to at most csv_rows rows.
    Volume,
    /// Sectional curvature profile of the warped product.
    ///
    /// curvature.csv: r, sec_radial, sph_lo, sph_hi (tangential curvature at the
    /// ends of the cross-section curvature range), ricci_lower.
    Curvature,
    /// Class B tail diagnostics, optionally with the asymptotic-solution conditions.
    ///
    /// classb.csv: r, ln_f, dev_first ((f'/f)^2 - a0), dev_second (f''/f - a0), sec_radial.
    /// hartman.csv: t, q, q_lambda, scaled (e^(2 lambda t) q_lambda), ratio_bound (|q|/(2 lambda)).
    Classb,
    /// Spectrum of a hyperbolic quotient and membership of query points.
    ///
    /// spectrum_membership.csv: re, im, distance (to the region), in_region,
    /// isolated (matches an eigenvalue), member.
    Spectrum,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Region => "region",
            Command::Residual => "residual",
            Command::Volume => "volume",
            Command::Curvature => "curvature",
            Command::Classb => "classb",
            Command::Spectrum => "spectrum",
        }
    }
}

/// Exit code for an error raised anywhere in a run.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<serde_json::Error>() {
            return EXIT_CONFIG;
        }
        if cause.is::<IoFailure>() || cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
        if let Some(lab) = cause.downcast_ref::<LabError>() {
            return match lab.class() {
                ErrorClass::Config => EXIT_CONFIG,
                ErrorClass::DomainGuard => EXIT_DOMAIN,
                ErrorClass::Decay => EXIT_DECAY,
                ErrorClass::Numeric => EXIT_NUMERIC,
            };
        }
    }
    EXIT_NUMERIC
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    let path = g.config.as_deref().ok_or_else(|| config::config_error("--config PATH is required"))?;
    let text = read_text(path)?;
    let config_dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let stamp = (!g.no_timestamp).then(now_stamp);
    let mut emitter = Emitter::new(&g.out, stamp)?;
    let inv = commands::Invocation { config_text: &text, config_dir, emitter: &mut emitter };
    let run = || match cli.command {
        Command::Region => commands::region(inv),
        Command::Residual => commands::residual(inv),
        Command::Volume => commands::volume(inv),
        Command::Curvature => commands::curvature(inv),
        Command::Classb => commands::classb(inv),
        Command::Spectrum => commands::spectrum(inv),
    };
    if g.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(g.threads).build()?.install(run)
    } else {
        run()
    }
}

/// Parses `args` and runs one subcommand, returning the process exit code.
pub fn run_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("lpspectra {}: {err:#}", cli.command.name());
            exit_code(&err)
        }
    }
}

pub fn run() -> ExitCode {
    ExitCode::from(run_with(std::env::args_os()))
}
