//! Report builders for each subcommand.

use std::fs;
use std::path::Path;

use serde::Serialize;
use zetadet::asymptotics::{fit_ray, log_grid, sum_ck_check, AsymptoticFit, Ray, SumCheck};
use zetadet::cylinder::{
    cylinder_logdet, gluing_residual, mode_bc_projection, CylinderBc, GluingResidual, Pieces,
};
use zetadet::gluing::{blocks_threshold, BlockMin, CapOperator};
use zetadet::modes::{
    dirichlet_root_sequence, mode_logdet_gy, mode_logdet_zeta, robin_mode_roots, ModeBc,
    ModeProblem, RootSequence,
};
use zetadet::scan::{adiabatic_scan, ScanRow, SlopeFit};
use zetadet::{SpectralInvariants, TangentialModel};

use crate::config::{CliError, CliResult};

/// Roots per mode for the root-route check.
const CHECK_ROOTS: usize = 200;

/// Relative tolerance of a fitted decay slope against `2 λ_min`.
pub const SLOPE_REL_TOL: f64 = 0.05;

#[derive(Debug, Serialize)]
pub struct ZetaReport {
    pub zeta_b2_0: f64,
    pub zeta_b2_0_err: f64,
    pub zeta_b2_deriv_0: f64,
    pub zeta_b2_deriv_0_err: f64,
    pub zeta_abs_b_m1: f64,
    pub zeta_abs_b_m1_err: f64,
    pub logdet_b2: f64,
    pub d_coefficient: f64,
    pub kernel_dim: usize,
    pub finite_spectrum: bool,
}

pub fn zeta(model: &TangentialModel) -> CliResult<ZetaReport> {
    let SpectralInvariants {
        zeta_b2_0,
        zeta_b2_deriv_0,
        zeta_abs_b_m1,
        logdet_b2,
        d_coefficient,
        kernel_dim,
        zeta_b2_0_err,
        zeta_b2_deriv_0_err,
        zeta_abs_b_m1_err,
    } = model.invariants()?;
    Ok(ZetaReport {
        zeta_b2_0,
        zeta_b2_0_err,
        zeta_b2_deriv_0,
        zeta_b2_deriv_0_err,
        zeta_abs_b_m1,
        zeta_abs_b_m1_err,
        logdet_b2,
        d_coefficient,
        kernel_dim,
        finite_spectrum: model.is_finite(),
    })
}

#[derive(Debug, Serialize)]
pub struct ModeCheck {
    pub lambda: f64,
    pub left: String,
    pub right: String,
    pub zeta_route: f64,
    pub closed_form: f64,
    pub difference: f64,
    pub max_root_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct RootCheck {
    pub modes: Vec<ModeCheck>,
    pub max_difference: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CylinderEntry {
    pub r: f64,
    pub value: f64,
    pub est_error: f64,
    pub pieces: Pieces,
}

#[derive(Debug, Serialize)]
pub struct CylinderReport {
    pub bc: CylinderBc,
    pub results: Vec<CylinderEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_check: Option<Vec<RootCheck>>,
}

impl CylinderReport {
    pub fn pass(&self) -> bool {
        self.root_check.iter().flatten().all(|c| c.pass)
    }
}

/// Robin roots, read from or written to `cache` when given.
fn robin_roots_cached(lambda: f64, r: f64, cache: Option<&Path>) -> CliResult<RootSequence> {
    let Some(dir) = cache else {
        return Ok(robin_mode_roots(lambda, r, CHECK_ROOTS)?);
    };
    let path = dir.join(format!(
        "robin_{:016x}_{:016x}_{CHECK_ROOTS}.json",
        lambda.to_bits(),
        r.to_bits()
    ));
    if let Ok(text) = fs::read_to_string(&path) {
        let seq: RootSequence = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if seq.lambda.to_bits() == lambda.to_bits() && seq.r.to_bits() == r.to_bits() {
            seq.validate()?;
            return Ok(seq);
        }
    }
    let seq = robin_mode_roots(lambda, r, CHECK_ROOTS)?;
    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    let text = serde_json::to_string(&seq).map_err(|e| CliError::Numerical(e.to_string()))?;
    fs::write(&path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(seq)
}

/// Compares the root route with the closed form on the lowest `modes` magnitudes.
fn root_check(
    model: &TangentialModel,
    r: f64,
    bc: CylinderBc,
    modes: usize,
    tol: f64,
    cache: Option<&Path>,
) -> CliResult<RootCheck> {
    let mut out = Vec::new();
    for line in model.lines().take(modes) {
        for lambda in [-line.lambda, line.lambda] {
            let (left, right) = mode_bc_projection(bc, lambda);
            let seq = if left == ModeBc::Dirichlet && right == ModeBc::Dirichlet {
                dirichlet_root_sequence(line.lambda, r, CHECK_ROOTS)
            } else {
                robin_roots_cached(line.lambda, r, cache)?
            };
            let zeta_route = mode_logdet_zeta(&seq)?;
            let closed_form = mode_logdet_gy(&ModeProblem::new(line.lambda, r, left, right)?);
            out.push(ModeCheck {
                lambda,
                left: format!("{left:?}"),
                right: format!("{right:?}"),
                zeta_route,
                closed_form,
                difference: zeta_route - closed_form,
                max_root_residual: seq.max_residual(),
            });
        }
    }
    let max_difference = out.iter().map(|m| m.difference.abs()).fold(0.0, f64::max);
    Ok(RootCheck {
        modes: out,
        max_difference,
        tol,
        pass: max_difference <= tol,
    })
}

pub fn cylinder_det(
    model: &TangentialModel,
    bc: CylinderBc,
    grid: &[f64],
    check_modes: usize,
    tol: f64,
    cache: Option<&Path>,
) -> CliResult<CylinderReport> {
    let mut results = Vec::with_capacity(grid.len());
    let mut checks = Vec::new();
    for &r in grid {
        let v = cylinder_logdet(model, r, bc)?;
        results.push(CylinderEntry {
            r,
            value: v.value,
            est_error: v.est_error,
            pieces: v.pieces,
        });
        if check_modes > 0 {
            checks.push(root_check(model, r, bc, check_modes, tol, cache)?);
        }
    }
    Ok(CylinderReport {
        bc,
        results,
        root_check: (check_modes > 0).then_some(checks),
    })
}

#[derive(Debug, Serialize)]
pub struct GluingRow {
    #[serde(flatten)]
    pub residual: GluingResidual,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct GluingReport {
    pub tol: f64,
    pub rows: Vec<GluingRow>,
    pub pass: bool,
}

/// A length passes when both the residual and its error estimate are within `tol`.
pub fn gluing_check(model: &TangentialModel, grid: &[f64], tol: f64) -> CliResult<GluingReport> {
    let rows = grid
        .iter()
        .map(|&r| {
            let g = gluing_residual(model, r)?;
            let pass = g.residual.abs().max(g.est_error) <= tol;
            Ok(GluingRow { residual: g, pass })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let pass = rows.iter().all(|r| r.pass);
    Ok(GluingReport { tol, rows, pass })
}

/// Default gluing tolerance: tighter for finite spectra.
pub fn default_gluing_tol(model: &TangentialModel) -> f64 {
    if model.is_finite() {
        1e-10
    } else {
        1e-8
    }
}

#[derive(Debug, Serialize)]
pub struct ScanReport {
    pub lambda_min: f64,
    pub expected_slope: f64,
    pub q_slope: Option<SlopeFit>,
    pub bracket_slope: Option<SlopeFit>,
    pub slope_pass: bool,
    pub final_r: f64,
    pub final_bracket_residual: f64,
    pub tol: f64,
    pub bracket_pass: bool,
    pub pass: bool,
    pub rows: Vec<ScanRow>,
}

/// Bracket and `log Det Q_r` scan. The slope check uses the bracket residual
/// when it is resolved above roundoff and the `Q_r` residual otherwise.
pub fn adiabatic(
    model: &TangentialModel,
    cap1: &CapOperator,
    cap2: &CapOperator,
    grid: &[f64],
    tol: f64,
) -> CliResult<ScanReport> {
    let table = adiabatic_scan(model, cap1, cap2, grid, grid[0])?;
    let expected_slope = 2.0 * table.lambda_min;
    let fit = table.bracket_slope.or(table.q_slope);
    let slope_pass =
        fit.is_some_and(|f| ((f.slope - expected_slope) / expected_slope).abs() <= SLOPE_REL_TOL);
    let last = table.rows.last().expect("grid is nonempty");
    let bracket_pass = last.residual.abs() <= tol;
    Ok(ScanReport {
        lambda_min: table.lambda_min,
        expected_slope,
        q_slope: table.q_slope,
        bracket_slope: table.bracket_slope,
        slope_pass,
        final_r: last.r,
        final_bracket_residual: last.residual,
        tol,
        bracket_pass,
        pass: slope_pass && bracket_pass,
        rows: table.rows,
    })
}

pub fn scan_csv(rows: &[ScanRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "r",
        "bracket",
        "limit",
        "residual",
        "q_logdet",
        "q_limit",
        "q_residual",
        "est_error",
    ])
    .map_err(|e| CliError::Numerical(e.to_string()))?;
    for row in rows {
        w.write_record(
            [
                row.r,
                row.bracket,
                row.limit,
                row.residual,
                row.q_logdet,
                row.q_limit,
                row.q_residual,
                row.est_error,
            ]
            .iter()
            .map(|x| x.to_string()),
        )
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Numerical(e.to_string()))
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum AsymReport {
    Ray {
        ray: Ray,
        theta: f64,
        d_coefficient: f64,
        fit: AsymptoticFit,
        deviation: f64,
        tol: f64,
        pass: bool,
    },
    Sum {
        #[serde(flatten)]
        check: SumCheck,
        sum_norm: f64,
        tol: f64,
        pass: bool,
    },
}

impl AsymReport {
    pub fn pass(&self) -> bool {
        match self {
            AsymReport::Ray { pass, .. } | AsymReport::Sum { pass, .. } => *pass,
        }
    }
}

/// One ray when `ray` is given, otherwise the whole `m`-family and `Σ c_k`.
/// The tolerance is scaled by `max(1, |d|)`.
pub fn asym_const(
    model: &TangentialModel,
    r: f64,
    m: usize,
    ray: Option<usize>,
    t: (f64, f64, usize),
    tol: f64,
) -> CliResult<AsymReport> {
    let grid = log_grid(t.0, t.1, t.2)?;
    let d = model.d_coefficient()?;
    let limit = tol * d.abs().max(1.0);
    Ok(match ray {
        Some(k) => {
            let ray = Ray::new(m, k)?;
            let fit = fit_ray(model, r, &ray, &grid)?;
            let deviation = (fit.pi0 - fit.predicted).norm();
            AsymReport::Ray {
                ray,
                theta: ray.theta(),
                d_coefficient: d,
                fit,
                deviation,
                tol: limit,
                pass: deviation <= limit,
            }
        }
        None => {
            let check = sum_ck_check(model, m, r, &grid)?;
            let sum_norm = check.sum_pi0.norm();
            let pass = sum_norm <= limit && check.theta_num_sum == 0;
            AsymReport::Sum {
                check,
                sum_norm,
                tol: limit,
                pass,
            }
        }
    })
}

#[derive(Debug, Serialize)]
pub struct BlocksReport {
    pub rows: Vec<BlockMin>,
    /// Smallest grid length beyond which every block is positive definite.
    pub r0: Option<f64>,
    pub pass: bool,
}

pub fn blocks(
    model: &TangentialModel,
    cap1: &CapOperator,
    cap2: &CapOperator,
    grid: &[f64],
) -> CliResult<BlocksReport> {
    let scan = blocks_threshold(model, cap1, cap2, grid)?;
    Ok(BlocksReport {
        pass: scan.r0.is_some(),
        r0: scan.r0,
        rows: scan.rows,
    })
}
