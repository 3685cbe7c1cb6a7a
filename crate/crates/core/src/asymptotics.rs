//! Large-parameter behaviour of `log Det Q(αt)` along complex rays.
//!
//! `Q(z)` acts on the `λ`-mode pair by
//! `√(λ² + z) + |λ| + 2w/(e^{2wr} − 1)`, `w = √(λ² + z)`. Its regularized
//! log-determinant is built by subtract-and-continue: with `x = z/λ²`,
//!
//! ```text
//! log(w + |λ|) = log 2 + log |λ| + g(x),     g(x) = log((1 + √(1 + x)) / 2)
//! ```
//!
//! The first two terms are continued through `ζ_{|B|}`. `g` is summed directly
//! for `|λ| ≤ 4√|z|` and through its power series `Σ g_j x^j` and tail Hurwitz
//! zetas beyond. Whenever a tail zeta sits on a pole, the `s`-expansion of
//! `(2|λ|)^{-s} e^{-s g}` leaves the extra finite terms
//! `−(log 2 · g_j + ½ (g²)_j) z^j Res`.

use std::f64::consts::{LN_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{SpectrumKind, TailZeta, TangentialModel};
use crate::sum::ComplexSum;

/// Number of series terms of `g` used beyond the head.
const SERIES_TERMS: usize = 14;

/// Head/tail split: levels with `|λ| ≤ HEAD_RATIO · √|z|` are summed directly.
const HEAD_RATIO: f64 = 4.0;

/// Target accuracy of a single evaluation.
pub const LOGDET_TOL: f64 = 1e-6;

/// Condition-number ceiling for the asymptotic fit.
pub const MAX_CONDITION: f64 = 1e10;

/// One ray `α_k = α₀ e^{2πik/m}` with `θ_k = arg α_k ∈ (−π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub m: usize,
    pub k: usize,
    /// `θ = theta_num · π / m`, kept exact so that angle sums are exact.
    pub theta_num: i64,
    pub alpha: Complex64,
}

impl Ray {
    /// `α₀ = e^{−2πi⌊m/2⌋/m}` for odd `m`, `e^{−i(m−1)π/m}` for even `m`.
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidProblem(format!(
                "ray family needs m ≥ 2, got {m}"
            )));
        }
        if k >= m {
            return Err(Error::InvalidProblem(format!(
                "ray index {k} out of range for m = {m}"
            )));
        }
        let (mi, ki) = (m as i64, k as i64);
        let start = if m % 2 == 1 { -2 * (mi / 2) } else { -(mi - 1) };
        let mut num = start + 2 * ki;
        // reduce into (−m, m]
        while num <= -mi {
            num += 2 * mi;
        }
        while num > mi {
            num -= 2 * mi;
        }
        let theta = num as f64 * PI / m as f64;
        Ok(Self {
            m,
            k,
            theta_num: num,
            alpha: Complex64::from_polar(1.0, theta),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta_num as f64 * PI / self.m as f64
    }

    pub fn conj(&self) -> Self {
        Self {
            theta_num: -self.theta_num,
            alpha: self.alpha.conj(),
            ..*self
        }
    }
}

/// All `m` rays of the family.
pub fn angle_set(m: usize) -> Result<Vec<Ray>> {
    (0..m).map(|k| Ray::new(m, k)).collect()
}

/// `w + |λ| + 2w e^{−wr}/(e^{wr} − e^{−wr})` with `w = √(λ² + z)`.
pub fn q_alpha_mode(lambda: f64, r: f64, z: Complex64) -> Result<Complex64> {
    let lambda = lambda.abs();
    let w = principal_w(lambda, z)?;
    Ok(w + lambda + cyl_excess(w, r))
}

fn principal_w(lambda: f64, z: Complex64) -> Result<Complex64> {
    let arg = z + lambda * lambda;
    if arg.im == 0.0
        && arg.re <= 0.0
        && !(arg.re == 0.0 && lambda == 0.0 && z == Complex64::new(0.0, 0.0))
    {
        return Err(Error::Branch(format!("{z}")));
    }
    Ok(arg.sqrt())
}

/// `2w / (e^{2wr} − 1)`
fn cyl_excess(w: Complex64, r: f64) -> Complex64 {
    if r.is_infinite() {
        return Complex64::new(0.0, 0.0);
    }
    let e = (-2.0 * w * r).exp();
    2.0 * w * e / (1.0 - e)
}

/// `log(1 + u)` without cancellation for small `u`.
fn complex_ln_1p(u: Complex64) -> Complex64 {
    if u.norm() < 1e-4 {
        u * (1.0 - u * (0.5 - u * (1.0 / 3.0 - 0.25 * u)))
    } else {
        (1.0 + u).ln()
    }
}

/// `w coth(wr)`, with its `w → 0` limit `1/r`.
fn kernel_q(w: Complex64, r: f64) -> Complex64 {
    if r.is_infinite() {
        return w;
    }
    let x = w * r;
    if x.norm() < 1e-4 {
        (1.0 + x * x / 3.0) / r
    } else {
        let e = (-2.0 * x).exp();
        w * (1.0 + e) / (1.0 - e)
    }
}

/// Taylor coefficients of `g(x) = log((1 + √(1 + x))/2)` and of `g²`.
pub fn g_series(n: usize) -> (Vec<f64>, Vec<f64>) {
    // h = (1 + √(1+x))/2 = 1 + H
    let mut binom = vec![0.0; n];
    if n > 0 {
        binom[0] = 1.0;
    }
    for j in 1..n {
        binom[j] = binom[j - 1] * (0.5 - (j as f64 - 1.0)) / j as f64;
    }
    let h: Vec<f64> = (0..n)
        .map(|j| if j == 0 { 0.0 } else { 0.5 * binom[j] })
        .collect();
    // log(1 + H): j L_j = j H_j − Σ_{k=1}^{j−1} k L_k H_{j−k}
    let mut g = vec![0.0; n];
    for j in 1..n {
        let mut acc = j as f64 * h[j];
        for k in 1..j {
            acc -= k as f64 * g[k] * h[j - k];
        }
        g[j] = acc / j as f64;
    }
    let g2 = (0..n)
        .map(|j| (0..=j).map(|k| g[k] * g[j - k]).sum())
        .collect();
    (g, g2)
}

/// A regularized complex value with its decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaLogdet {
    pub z: Complex64,
    pub value: Complex64,
    /// `log 2 · ζ_{|B|}(0) − ζ'_{|B|}(0)`
    pub zeta_part: f64,
    pub head: Complex64,
    pub series: Complex64,
    pub cylinder: Complex64,
    pub kernel_part: Complex64,
    pub head_levels: usize,
    pub est_error: f64,
}

/// Regularized `log Det Q(z)` on a cylinder of length `r`.
pub fn logdet_q_z(model: &TangentialModel, r: f64, z: Complex64) -> Result<AlphaLogdet> {
    logdet_q_z_split(model, r, z, HEAD_RATIO)
}

fn logdet_q_z_split(
    model: &TangentialModel,
    r: f64,
    z: Complex64,
    ratio: f64,
) -> Result<AlphaLogdet> {
    if !(r > 0.0) {
        return Err(Error::InvalidProblem(format!("r must be > 0, got {r}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidProblem(format!("non-finite z = {z}")));
    }
    let kernel_part = if model.kernel_dim() > 0 {
        let w = principal_w(0.0, z)?;
        kernel_q(w, r).ln() * model.kernel_dim() as f64
    } else {
        Complex64::new(0.0, 0.0)
    };

    let (head, series, zeta_part, head_levels, mut err) = match model.kind() {
        SpectrumKind::Explicit { .. } => {
            let mut acc = ComplexSum::new();
            for line in model.lines() {
                let w = principal_w(line.lambda, z)?;
                acc.add(2.0 * line.mult() * (w + line.lambda).ln());
            }
            let n = model.lines().count();
            (acc.value(), Complex64::new(0.0, 0.0), 0.0, n, 0.0)
        }
        SpectrumKind::Arithmetic { .. } => arithmetic_parts(model, z, ratio)?,
    };

    // exponentially small cylinder factor, absolutely convergent
    let mut cyl = ComplexSum::new();
    let mut cyl_err = 0.0;
    if r.is_finite() {
        let term = |lambda: f64| -> Result<Complex64> {
            let w = principal_w(lambda, z)?;
            Ok(complex_ln_1p(cyl_excess(w, r) / (w + lambda)))
        };
        let envelope = |lambda: f64| 3.0 * term(lambda).map(|c| c.norm()).unwrap_or(f64::INFINITY);
        cyl_err = model.walk_lines(1e-14, envelope, |line| {
            cyl.add(2.0 * line.mult() * term(line.lambda)?);
            Ok(())
        })?;
    }
    let cylinder = cyl.value();
    err += cyl_err;

    let mut total = ComplexSum::new();
    total.add(Complex64::new(zeta_part, 0.0));
    total.add(head);
    total.add(series);
    total.add(cylinder);
    total.add(kernel_part);
    let value = total.value();
    err += 16.0 * f64::EPSILON * (zeta_part.abs() + head.norm() + series.norm() + value.norm());
    Ok(AlphaLogdet {
        z,
        value,
        zeta_part,
        head,
        series,
        cylinder,
        kernel_part,
        head_levels,
        est_error: err,
    })
}

type Parts = (Complex64, Complex64, f64, usize, f64);

fn arithmetic_parts(model: &TangentialModel, z: Complex64, ratio: f64) -> Result<Parts> {
    let zero = Complex64::new(0.0, 0.0);
    let z_abs = model.zeta_abs_b(zero)?;
    let (dz, dz_err) = model.zeta_b2_deriv(zero)?;
    // ζ'_{|B|}(0) = ½ ζ'_{B²}(0)
    let zeta_part = LN_2 * z_abs.value.re - 0.5 * dz.re;
    let mut err = LN_2 * z_abs.est_error + 0.5 * dz_err;

    let n_head = model.levels_below(ratio * z.norm().sqrt());
    let mut head = ComplexSum::new();
    for n in 0..n_head {
        let line = model.arithmetic_level(n).expect("arithmetic model");
        if line.multiplicity == 0 {
            continue;
        }
        let w = principal_w(line.lambda, z)?;
        head.add(2.0 * line.mult() * ((w + line.lambda) / (2.0 * line.lambda)).ln());
    }

    let (g, g2) = g_series(SERIES_TERMS + 1);
    let mut series = ComplexSum::new();
    let mut zp = Complex64::new(1.0, 0.0);
    let mut last = 0.0;
    for j in 1..=SERIES_TERMS {
        zp *= z;
        if zp == zero {
            break;
        }
        let term = match model.arithmetic_tail_zeta(n_head, 2.0 * j as f64)? {
            TailZeta::Regular { value, est_error } => {
                err += (g[j] * zp).norm() * est_error;
                zp * (g[j] * value)
            }
            TailZeta::Pole {
                residue,
                finite,
                est_error,
            } => {
                err += (g[j] * zp).norm() * est_error;
                zp * (g[j] * finite - (0.5 * g2[j] + LN_2 * g[j]) * residue)
            }
        };
        last = term.norm();
        series.add(term);
    }
    if last > LOGDET_TOL {
        return Err(Error::InsufficientDecay(format!(
            "last series term {last:e} with {SERIES_TERMS} terms and {n_head} head levels"
        )));
    }
    err += last;
    Ok((head.value(), series.value(), zeta_part, n_head, err))
}

/// `log Det Q(α t)` along a ray.
pub fn logdet_q_alpha(model: &TangentialModel, r: f64, ray: &Ray, t: f64) -> Result<AlphaLogdet> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidProblem(format!(
            "t must be finite and > 0, got {t}"
        )));
    }
    logdet_q_z(model, r, ray.alpha * t)
}

/// Basis functions of the fit in `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BasisFn {
    /// `t^{p/2}`
    HalfPower(i32),
    /// `t^{j} log t`
    PowerLog(i32),
}

impl BasisFn {
    fn eval(self, t: f64) -> f64 {
        match self {
            BasisFn::HalfPower(p) => t.powf(p as f64 / 2.0),
            BasisFn::PowerLog(j) => t.powi(j) * t.ln(),
        }
    }

    fn label(self) -> String {
        match self {
            BasisFn::HalfPower(0) => "1".into(),
            BasisFn::HalfPower(p) if p % 2 == 0 => format!("t^{}", p / 2),
            BasisFn::HalfPower(p) => format!("t^{p}/2"),
            BasisFn::PowerLog(0) => "log t".into(),
            BasisFn::PowerLog(j) => format!("t^{j} log t"),
        }
    }
}

/// `{t^{1/2}, log t, 1, t^{−1/2}, t^{−1}}`.
pub fn standard_basis() -> Vec<BasisFn> {
    vec![
        BasisFn::HalfPower(1),
        BasisFn::PowerLog(0),
        BasisFn::HalfPower(0),
        BasisFn::HalfPower(-1),
        BasisFn::HalfPower(-2),
    ]
}

/// Basis for a spectrum with growth exponent `g`: `t^{p/2}` for
/// `p = g, …, −2`, plus `t^j log t` for `j = 0, …, ⌊g/2⌋`. Equals
/// [`standard_basis`] for `g ≤ 1`.
pub fn basis_for_growth(growth: f64) -> Vec<BasisFn> {
    let g = growth.ceil().max(1.0) as i32;
    if g == 1 {
        return standard_basis();
    }
    let mut out = Vec::new();
    for p in (-2..=g).rev() {
        out.push(BasisFn::HalfPower(p));
        if p >= 0 && p % 2 == 0 {
            out.push(BasisFn::PowerLog(p / 2));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitTerm {
    pub basis: String,
    pub coefficient: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub terms: Vec<FitTerm>,
    /// Coefficient of the constant basis function.
    pub pi0: Complex64,
    /// `(i/2) θ d_{m−1}`
    pub predicted: Complex64,
    pub residual_norm: f64,
    pub condition: f64,
}

impl AsymptoticFit {
    pub fn coefficient(&self, basis: &str) -> Option<Complex64> {
        self.terms
            .iter()
            .find(|t| t.basis == basis)
            .map(|t| t.coefficient)
    }
}

/// Least-squares fit of samples `(t, value)` against `basis`; the constant
/// term is compared with `(i/2) θ d`.
pub fn fit_constant_term(
    samples: &[(f64, Complex64)],
    basis: &[BasisFn],
    theta: f64,
    d_coefficient: f64,
) -> Result<AsymptoticFit> {
    if samples.len() < 8 {
        return Err(Error::InvalidFit(format!(
            "need at least 8 samples, got {}",
            samples.len()
        )));
    }
    if samples.len() < basis.len() {
        return Err(Error::InvalidFit(
            "fewer samples than basis functions".into(),
        ));
    }
    let (tmin, tmax) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(t, _)| {
            (lo.min(t), hi.max(t))
        });
    if !(tmin > 0.0) || !(tmax / tmin >= 100.0 * (1.0 - 1e-12)) {
        return Err(Error::InvalidFit(format!(
            "samples span [{tmin}, {tmax}], need ≥ 2 decades"
        )));
    }
    let Some(const_idx) = basis.iter().position(|b| *b == BasisFn::HalfPower(0)) else {
        return Err(Error::InvalidFit("basis lacks a constant term".into()));
    };
    let (rows, cols) = (samples.len(), basis.len());
    let mut design = DMatrix::<f64>::zeros(rows, cols);
    for (i, &(t, _)) in samples.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            design[(i, j)] = b.eval(t);
        }
    }
    // column scaling
    let scales: Vec<f64> = (0..cols).map(|j| design.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        if !(*s > 0.0) {
            return Err(Error::IllConditionedFit(f64::INFINITY));
        }
        design.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditionedFit(condition));
    }
    let re = DVector::from_iterator(rows, samples.iter().map(|s| s.1.re));
    let im = DVector::from_iterator(rows, samples.iter().map(|s| s.1.im));
    let solve = |b: &DVector<f64>| {
        svd.solve(b, 0.0)
            .map_err(|e| Error::InvalidFit(e.to_string()))
    };
    let xr = solve(&re)?;
    let xi = solve(&im)?;
    let rr = &design * &xr - &re;
    let ri = &design * &xi - &im;
    let residual_norm = (rr.norm_squared() + ri.norm_squared()).sqrt();
    let terms: Vec<FitTerm> = basis
        .iter()
        .enumerate()
        .map(|(j, b)| FitTerm {
            basis: b.label(),
            coefficient: Complex64::new(xr[j], xi[j]) / scales[j],
        })
        .collect();
    let pi0 = terms[const_idx].coefficient;
    Ok(AsymptoticFit {
        terms,
        pi0,
        predicted: Complex64::new(0.0, 0.5 * theta * d_coefficient),
        residual_norm,
        condition,
    })
}

/// `n` log-spaced points in `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max > t_min) || n < 2 {
        return Err(Error::InvalidFit(format!(
            "bad grid [{t_min}, {t_max}] with {n} points"
        )));
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                t_max
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

/// Samples `logdet_q_alpha` on the grid and fits the constant term.
pub fn fit_ray(model: &TangentialModel, r: f64, ray: &Ray, grid: &[f64]) -> Result<AsymptoticFit> {
    let samples = grid
        .iter()
        .map(|&t| Ok((t, logdet_q_alpha(model, r, ray, t)?.value)))
        .collect::<Result<Vec<_>>>()?;
    let basis = basis_for_growth(model.spectral_growth());
    fit_constant_term(&samples, &basis, ray.theta(), model.d_coefficient()?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayReport {
    pub ray: Ray,
    pub theta: f64,
    pub fit: AsymptoticFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumCheck {
    pub m: usize,
    pub rays: Vec<RayReport>,
    /// `Σ_k θ_k` in units of `π/m`; exactly zero for the constructed set.
    pub theta_num_sum: i64,
    pub sum_pi0: Complex64,
    pub d_coefficient: f64,
}

/// Fits every ray of the `m`-family and sums the constant terms.
pub fn sum_ck_check(model: &TangentialModel, m: usize, r: f64, grid: &[f64]) -> Result<SumCheck> {
    let rays = angle_set(m)?;
    let theta_num_sum = rays.iter().map(|r| r.theta_num).sum();
    let mut reports = Vec::with_capacity(m);
    let mut total = ComplexSum::new();
    for ray in rays {
        let fit = fit_ray(model, r, &ray, grid)?;
        total.add(fit.pi0);
        reports.push(RayReport {
            ray,
            theta: ray.theta(),
            fit,
        });
    }
    Ok(SumCheck {
        m,
        rays: reports,
        theta_num_sum,
        sum_pi0: total.value(),
        d_coefficient: model.d_coefficient()?,
    })
}
