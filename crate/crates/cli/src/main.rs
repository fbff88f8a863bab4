//! `onebit`: compute, optimize, and numerically verify the capacity per
//! unit-cost of the bandlimited Gaussian channel with one-bit output
//! quantization, at slot-rate and double-rate sampling.
//!
//! Exit codes: 0 success, 1 property violation, 2 usage/domain error,
//! 3 numeric failure.

mod commands;
mod config;
mod figure2;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: msg.into(),
        }
    }

    pub fn violation(msg: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            message: msg.into(),
        }
    }

    pub fn numeric(msg: impl Into<String>) -> CliError {
        CliError {
            code: 3,
            message: msg.into(),
        }
    }
}

impl From<onebit_core::Error> for CliError {
    fn from(e: onebit_core::Error) -> CliError {
        match e {
            onebit_core::Error::Domain(_) | onebit_core::Error::Resource(_) => {
                CliError::usage(e.to_string())
            }
            onebit_core::Error::Numeric { .. } => CliError::numeric(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "onebit", version, about = "One-bit quantized channel capacity toolkit")]
struct Cli {
    /// Flat key=value config file (flags override file keys). Defaults to
    /// $ONEBIT_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format where the command supports both (csv, json).
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form orthant probabilities with quadrature cross-checks.
    Orthant {
        /// Bivariate correlation coefficient.
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<f64>,
        /// Trivariate structure: `paper` or `r12,r13,r23`.
        #[arg(long, allow_hyphen_values = true)]
        k: Option<String>,
        #[arg(long)]
        abs_tol: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        max_subdivisions: Option<usize>,
    },
    /// Randomized remainder-envelope soundness sweep for the CCDF expansions.
    VerifyProp {
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        max_a: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Normalized achievable rate slope for a boundary lambda or an explicit
    /// feature triple.
    Bound {
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        /// Explicit `alpha0,beta0,gamma0`.
        #[arg(long, allow_hyphen_values = true)]
        features: Option<String>,
        #[arg(long)]
        w: Option<f64>,
        #[arg(long)]
        n0: Option<f64>,
    },
    /// Golden-section maximization of the boundary rate slope over lambda.
    Optimize {
        /// Search bracket `lo,hi`.
        #[arg(long, allow_hyphen_values = true)]
        bracket: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Boundary-curve and level-contour data for the feature plane.
    Figure2 {
        /// Cells per axis of the marching grid (>= 16).
        #[arg(long)]
        resolution: Option<usize>,
        /// Contour level of the normalized rate slope.
        #[arg(long)]
        level: Option<f64>,
        /// Lambda grid range `lo,hi` for the boundary curve.
        #[arg(long, allow_hyphen_values = true)]
        lambda_range: Option<String>,
        #[arg(long)]
        boundary_out: Option<PathBuf>,
        #[arg(long)]
        contour_out: Option<PathBuf>,
    },
    /// Exact ISI-truncated law, Monte Carlo tallies, plug-in MI, slope fit.
    Simulate {
        /// Single power level (overrides the grid).
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated power grid.
        #[arg(long)]
        p_grid: Option<String>,
        /// Monte Carlo trials per power level (0 disables sampling).
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// ISI half-width (neighbor symbols per side).
        #[arg(long)]
        j: Option<usize>,
        /// Pulse family: sinc, optimal, raised.
        #[arg(long)]
        pulse: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
        /// Output grouping: nyquist or double.
        #[arg(long)]
        sampling: Option<String>,
        #[arg(long)]
        w: Option<f64>,
        #[arg(long)]
        n0: Option<f64>,
        #[arg(long)]
        abs_tol: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        max_subdivisions: Option<usize>,
    },
    /// Quarter-slot tap export for a pulse.
    Taps {
        #[arg(long)]
        pulse: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        w: Option<f64>,
        /// Truncation half-width in half-slot units.
        #[arg(long)]
        half_width: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .or_else(|| std::env::var_os("ONEBIT_CONFIG").map(PathBuf::from));
    let cfg = match config_path {
        Some(p) => config::RunConfig::from_file(&p)?,
        None => config::RunConfig::default(),
    };
    let ctx = commands::Ctx {
        cfg,
        out: cli.out,
        format: cli.format,
    };
    match cli.command {
        Command::Orthant {
            rho,
            k,
            abs_tol,
            rel_tol,
            max_subdivisions,
        } => commands::orthant(&ctx, rho, k, abs_tol, rel_tol, max_subdivisions),
        Command::VerifyProp { draws, max_a, seed } => commands::verify_prop(&ctx, draws, max_a, seed),
        Command::Bound {
            lambda,
            features,
            w,
            n0,
        } => commands::bound(&ctx, lambda, features, w, n0),
        Command::Optimize { bracket, tol } => commands::optimize(&ctx, bracket, tol),
        Command::Figure2 {
            resolution,
            level,
            lambda_range,
            boundary_out,
            contour_out,
        } => commands::figure2_cmd(&ctx, resolution, level, lambda_range, boundary_out, contour_out),
        Command::Simulate {
            p,
            p_grid,
            n,
            seed,
            j,
            pulse,
            lambda,
            xi,
            sampling,
            w,
            n0,
            abs_tol,
            rel_tol,
            max_subdivisions,
        } => commands::simulate(
            &ctx,
            commands::SimulateArgs {
                p,
                p_grid,
                n,
                seed,
                j,
                pulse,
                lambda,
                xi,
                sampling,
                w,
                n0,
                abs_tol,
                rel_tol,
                max_subdivisions,
            },
        ),
        Command::Taps {
            pulse,
            lambda,
            xi,
            w,
            half_width,
        } => commands::taps(&ctx, pulse, lambda, xi, w, half_width),
    }
}
