//! Scans over the cylinder length and exponential-decay fits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gluing::{adiabatic_bracket, q_limit, q_logdet, CapOperator};
use crate::spectral::TangentialModel;

/// Residuals at or below this level are treated as roundoff in slope fits.
pub const NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub r: f64,
    pub bracket: f64,
    pub limit: f64,
    pub residual: f64,
    pub q_logdet: f64,
    pub q_limit: f64,
    pub q_residual: f64,
    pub est_error: f64,
}

/// Least-squares fit of `log|residual| ≈ intercept − slope · r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub lambda_min: f64,
    /// Decay rate of `log Det Q_r − limit`.
    pub q_slope: Option<SlopeFit>,
    /// Decay rate of the bracket residual; `None` when it stays at roundoff.
    pub bracket_slope: Option<SlopeFit>,
}

/// `steps` equally spaced points in `[r_min, r_max]`.
pub fn linear_grid(r_min: f64, r_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0) || !(r_max >= r_min) || !r_max.is_finite() || steps == 0 {
        return Err(Error::InvalidProblem(format!(
            "bad grid [{r_min}, {r_max}] with {steps} points"
        )));
    }
    if steps == 1 {
        return Ok(vec![r_min]);
    }
    let h = (r_max - r_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                r_max
            } else {
                r_min + h * i as f64
            }
        })
        .collect())
}

/// Fits the decay rate of `|values|` over `rs`, ignoring points at roundoff.
pub fn fit_decay_slope(rs: &[f64], values: &[f64]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = rs
        .iter()
        .zip(values)
        .filter(|(_, v)| v.abs() > NOISE_FLOOR)
        .map(|(&r, v)| (r, v.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Some(SlopeFit {
        slope: -b,
        intercept: my - b * mx,
        points: pts.len(),
    })
}

/// Bracket and `log Det Q_r` over a grid of lengths, with decay fits
/// restricted to `r ≥ fit_from`.
pub fn adiabatic_scan(
    model: &TangentialModel,
    cap1: &CapOperator,
    cap2: &CapOperator,
    grid: &[f64],
    fit_from: f64,
) -> Result<ScanTable> {
    let lambda_min = model
        .lambda_min()
        .ok_or_else(|| Error::InvalidModel("model has no nonzero eigenvalues".into()))?;
    let q_lim = q_limit(model)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &r in grid {
        let b = adiabatic_bracket(model, cap1, cap2, r)?;
        let q = q_logdet(model, r)?;
        rows.push(ScanRow {
            r,
            bracket: b.bracket,
            limit: b.limit,
            residual: b.residual,
            q_logdet: q.value,
            q_limit: q_lim,
            q_residual: q.value - q_lim,
            est_error: b.est_error,
        });
    }
    let fit_rows: Vec<&ScanRow> = rows.iter().filter(|row| row.r >= fit_from).collect();
    let rs: Vec<f64> = fit_rows.iter().map(|row| row.r).collect();
    let q_res: Vec<f64> = fit_rows.iter().map(|row| row.q_residual).collect();
    let b_res: Vec<f64> = fit_rows
        .iter()
        .map(|row| {
            if row.residual.abs() > 4.0 * row.est_error {
                row.residual
            } else {
                0.0
            }
        })
        .collect();
    Ok(ScanTable {
        q_slope: fit_decay_slope(&rs, &q_res),
        bracket_slope: fit_decay_slope(&rs, &b_res),
        rows,
        lambda_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid() {
        assert_eq!(linear_grid(1.0, 2.0, 3).unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(linear_grid(0.0, 2.0, 3).is_err());
        assert!(linear_grid(2.0, 1.0, 3).is_err());
    }

    #[test]
    fn slope_of_pure_exponential() {
        let rs = [1.0, 2.0, 3.0, 4.0];
        let v: Vec<f64> = rs.iter().map(|r: &f64| 3.0 * (-1.7 * r).exp()).collect();
        let fit = fit_decay_slope(&rs, &v).unwrap();
        assert!((fit.slope - 1.7).abs() < 1e-12);
        assert!(fit_decay_slope(&rs, &[0.0; 4]).is_none());
    }
}
