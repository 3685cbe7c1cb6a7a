//! Loading of model and cap files, grids and the error-to-exit-code mapping.

use std::fmt;
use std::fs;
use std::path::Path;

use zetadet::gluing::CapOperator;
use zetadet::scan::linear_grid;
use zetadet::{Error, TangentialModel};

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input files or parameters (exit 1).
    Config(String),
    /// A computation failed (exit 2).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidModel(_)
            | Error::DegreeTooHigh(_)
            | Error::UnsupportedBoundary(_)
            | Error::KernelPresent(_)
            | Error::InvalidCap(_)
            | Error::InvalidProblem(_)
            | Error::InvalidFit(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> CliResult<TangentialModel> {
    TangentialModel::from_json(&read(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Loads a cap file, or `mu = |λ|` when no path is given.
pub fn load_cap(path: Option<&Path>) -> CliResult<CapOperator> {
    match path {
        None => Ok(CapOperator::abs_b()),
        Some(p) => CapOperator::from_json(&read(p)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
    }
}

pub fn require_positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

/// A single length, an explicit `[r_min, r_max]` grid, or the default grid.
pub fn r_grid(
    r: Option<f64>,
    r_min: Option<f64>,
    r_max: Option<f64>,
    steps: Option<usize>,
    default: &[f64],
) -> CliResult<Vec<f64>> {
    let grid = match (r, r_min, r_max) {
        (Some(r), None, None) => vec![require_positive("--r", r)?],
        (None, None, None) => default.to_vec(),
        (None, Some(lo), Some(hi)) => {
            let steps = steps.unwrap_or(15);
            if steps < 2 {
                return Err(CliError::Config("--steps must be at least 2".into()));
            }
            linear_grid(lo, hi, steps)?
        }
        (Some(_), _, _) => {
            return Err(CliError::Config(
                "--r conflicts with --r-min/--r-max".into(),
            ))
        }
        _ => {
            return Err(CliError::Config(
                "--r-min and --r-max must be given together".into(),
            ))
        }
    };
    check_increasing("r", &grid)?;
    Ok(grid)
}

pub fn check_increasing(name: &str, grid: &[f64]) -> CliResult<()> {
    if grid.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(CliError::Config(format!(
            "{name} grid must be positive and finite"
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::Config(format!(
            "{name} grid must be strictly increasing"
        )));
    }
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
