//! `zetadet`: zeta-regularized cylinder determinants and gluing checks.
//!
//! Exit codes: 0 pass, 1 configuration error, 2 numerical failure, 3 check failed.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use zetadet::cylinder::CylinderBc;

use config::{
    check_increasing, load_cap, load_model, r_grid, require_positive, write_text, CliError,
    CliResult,
};

#[derive(Parser)]
#[command(
    name = "zetadet",
    version,
    about = "Zeta-regularized determinants on cylinders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Tangential model JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Caps {
    /// Cap operator JSON for the first piece (default mu = |λ|).
    #[arg(long)]
    cap1: Option<PathBuf>,
    /// Cap operator JSON for the second piece (default mu = |λ|).
    #[arg(long)]
    cap2: Option<PathBuf>,
}

#[derive(Args)]
struct Lengths {
    /// A single cylinder length.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    /// Number of equally spaced lengths in [r-min, r-max].
    #[arg(long)]
    steps: Option<usize>,
}

impl Lengths {
    fn grid(&self, default: &[f64]) -> CliResult<Vec<f64>> {
        r_grid(self.r, self.r_min, self.r_max, self.steps, default)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Spectral invariants of the tangential operator.
    Zeta {
        #[command(flatten)]
        common: Common,
    },
    /// Log-determinant of the cylinder Laplacian for one boundary pair.
    CylinderDet {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lengths: Lengths,
        /// Boundary pair: D,D  D,P<  D,P<=  P>=,D  P>,D  D,R
        #[arg(long, default_value = "D,D")]
        bc: CylinderBc,
        /// Check the root route against the closed form on this many lowest modes.
        #[arg(long, default_value_t = 0)]
        check_modes: usize,
        /// Tolerance of the root-route check.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Directory for cached root sequences.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Robin/APS gluing residual over a grid of lengths.
    GluingCheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lengths: Lengths,
        /// Defaults to 1e-8, or 1e-10 for finite spectra.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Adiabatic bracket and log Det Q_r over a grid, with a decay-rate fit.
    AdiabaticScan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        lengths: Lengths,
        /// Allowed bracket residual at the largest length.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Write the scan table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Constant term of log Det Q(α t) along rays, and the sum over a family.
    AsymConst {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        /// Number of rays in the family.
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Fit a single ray of the family instead of all of them.
        #[arg(long)]
        ray: Option<usize>,
        #[arg(long, default_value_t = 100.0)]
        t_min: f64,
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
        #[arg(long, default_value_t = 9)]
        t_steps: usize,
        /// Tolerance, scaled by max(1, |d|).
        #[arg(long, default_value_t = 2e-3)]
        tol: f64,
    },
    /// Smallest eigenvalue of the 2×2 blocks of R_{-r,r} and the positivity threshold.
    BlocksThreshold {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        lengths: Lengths,
    },
}

fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> CliResult<()> {
    let text =
        serde_json::to_string_pretty(report).map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(CliError::Config(format!("stdout: {e}")));
        }
    }
    if let Some(path) = out {
        write_text(path, &format!("{text}\n"))?;
    }
    Ok(())
}

/// Runs a command; `Ok(false)` means a check failed.
fn run(command: Command) -> CliResult<bool> {
    match command {
        Command::Zeta { common } => {
            let model = load_model(&common.model)?;
            emit(&commands::zeta(&model)?, common.out.as_deref())?;
            Ok(true)
        }
        Command::CylinderDet {
            common,
            lengths,
            bc,
            check_modes,
            tol,
            cache,
        } => {
            let model = load_model(&common.model)?;
            let grid = lengths.grid(&[1.0])?;
            let tol = require_positive("--tol", tol)?;
            let report =
                commands::cylinder_det(&model, bc, &grid, check_modes, tol, cache.as_deref())?;
            emit(&report, common.out.as_deref())?;
            Ok(report.pass())
        }
        Command::GluingCheck {
            common,
            lengths,
            tol,
        } => {
            let model = load_model(&common.model)?;
            let grid = lengths.grid(&[0.5, 1.0, 2.0, 4.0])?;
            let tol = require_positive(
                "--tol",
                tol.unwrap_or_else(|| commands::default_gluing_tol(&model)),
            )?;
            let report = commands::gluing_check(&model, &grid, tol)?;
            emit(&report, common.out.as_deref())?;
            Ok(report.pass)
        }
        Command::AdiabaticScan {
            common,
            caps,
            lengths,
            tol,
            csv,
        } => {
            let model = load_model(&common.model)?;
            let cap1 = load_cap(caps.cap1.as_deref())?;
            let cap2 = load_cap(caps.cap2.as_deref())?;
            let grid = lengths.grid(&default_scan_grid())?;
            if grid.len() < 3 {
                return Err(CliError::Config(
                    "adiabatic-scan needs at least 3 lengths".into(),
                ));
            }
            let tol = require_positive("--tol", tol)?;
            let report = commands::adiabatic(&model, &cap1, &cap2, &grid, tol)?;
            if let Some(path) = csv {
                write_text(&path, &commands::scan_csv(&report.rows)?)?;
            }
            emit(&report, common.out.as_deref())?;
            Ok(report.pass)
        }
        Command::AsymConst {
            common,
            r,
            m,
            ray,
            t_min,
            t_max,
            t_steps,
            tol,
        } => {
            let model = load_model(&common.model)?;
            let r = require_positive("--r", r)?;
            let tol = require_positive("--tol", tol)?;
            check_increasing("t", &[t_min, t_max])?;
            let report = commands::asym_const(&model, r, m, ray, (t_min, t_max, t_steps), tol)?;
            emit(&report, common.out.as_deref())?;
            Ok(report.pass())
        }
        Command::BlocksThreshold {
            common,
            caps,
            lengths,
        } => {
            let model = load_model(&common.model)?;
            let cap1 = load_cap(caps.cap1.as_deref())?;
            let cap2 = load_cap(caps.cap2.as_deref())?;
            let grid = lengths.grid(&default_scan_grid())?;
            let report = commands::blocks(&model, &cap1, &cap2, &grid)?;
            emit(&report, common.out.as_deref())?;
            Ok(report.pass)
        }
    }
}

/// `r = 1, 1.5, …, 8`.
fn default_scan_grid() -> Vec<f64> {
    (0..15).map(|i| 1.0 + 0.5 * i as f64).collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("zetadet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
