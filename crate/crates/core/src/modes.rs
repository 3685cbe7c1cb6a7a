//! One-dimensional mode problems `−φ'' + λ²φ = μφ` on `[0, r]`.
//!
//! Three independent routes are provided for each mode determinant: closed
//! forms, zeta continuation over computed eigenvalue sequences, and (for the
//! Dirichlet-to-Neumann value) a Runge–Kutta shooting solve.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{hurwitz_zeta_real, hurwitz_zeta_zero_deriv};
use crate::sum::NeumaierSum;

/// Minimum number of explicit roots for the zeta route.
pub const MIN_ROOTS: usize = 30;

/// Bound on `|Δν|` for computed roots.
pub const ROOT_TOL: f64 = 1e-13;

/// Bound on the normalized residual of the defining equation at each root.
pub const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeBc {
    Dirichlet,
    /// `φ' + |λ|φ = 0`, outward-normalized.
    RobinAbs,
    /// `φ' = 0`; the `λ = 0` case of `RobinAbs`.
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeProblem {
    pub lambda: f64,
    pub r: f64,
    pub left: ModeBc,
    pub right: ModeBc,
}

impl ModeProblem {
    pub fn new(lambda: f64, r: f64, left: ModeBc, right: ModeBc) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "lambda must be finite and ≥ 0, got {lambda}"
            )));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "r must be finite and > 0, got {r}"
            )));
        }
        if left != ModeBc::Dirichlet && right != ModeBc::Dirichlet {
            return Err(Error::InvalidProblem(
                "at least one end must carry a Dirichlet condition".into(),
            ));
        }
        if (left == ModeBc::Neumann || right == ModeBc::Neumann) && lambda != 0.0 {
            return Err(Error::InvalidProblem(format!(
                "Neumann ends only arise for lambda = 0, got {lambda}"
            )));
        }
        Ok(Self {
            lambda,
            r,
            left,
            right,
        })
    }

    /// The non-Dirichlet end, if any. Reflection `u ↦ r − u` makes the two
    /// orientations isospectral, so only the condition matters.
    pub fn free_end(&self) -> ModeBc {
        if self.left == ModeBc::Dirichlet {
            self.right
        } else {
            self.left
        }
    }
}

/// `μ_k = λ² + (kπ/r)²`, `k = 1..=count`.
pub fn dirichlet_mode_eigen(lambda: f64, r: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| {
            let nu = k as f64 * PI / r;
            lambda * lambda + nu * nu
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootFamily {
    Dirichlet,
    #[default]
    Robin,
}

/// Coefficients of `δ_l X_l ≈ a1 + a3 / X_l²`, where `ν_l r = X_l + δ_l`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TailParams {
    pub a1: f64,
    pub a3: f64,
}

/// Eigenvalues `μ_l` of one mode problem, with the large-`l` tail model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSequence {
    pub lambda: f64,
    pub r: f64,
    pub roots: Vec<f64>,
    #[serde(default)]
    pub family: RootFamily,
    #[serde(default)]
    pub tail_params: TailParams,
    #[serde(default)]
    pub count: usize,
}

impl RootSequence {
    fn offset(&self) -> f64 {
        match self.family {
            RootFamily::Dirichlet => 1.0,
            RootFamily::Robin => 0.5,
        }
    }

    /// `X_l = (l + c)π` for the unperturbed sequence.
    fn base(&self, l: usize) -> f64 {
        (l as f64 + self.offset()) * PI
    }

    pub fn nu(&self, l: usize) -> f64 {
        (self.roots[l] - self.lambda * self.lambda).sqrt()
    }

    /// `max_l |ν cos νr + λ sin νr| / √(ν² + λ²)` (Robin) or `|sin νr|` (Dirichlet).
    pub fn max_residual(&self) -> f64 {
        (0..self.roots.len())
            .map(|l| {
                let nu = self.nu(l);
                let x = nu * self.r;
                match self.family {
                    RootFamily::Robin => {
                        (nu * x.cos() + self.lambda * x.sin()).abs() / nu.hypot(self.lambda)
                    }
                    RootFamily::Dirichlet => x.sin().abs(),
                }
            })
            .fold(0.0, f64::max)
    }

    /// Re-checks ordering, brackets, residuals and tail parameters, e.g. for
    /// a sequence loaded from a cache.
    pub fn validate(&self) -> Result<()> {
        if self.roots.len() < MIN_ROOTS {
            return Err(Error::InsufficientRoots {
                got: self.roots.len(),
                need: MIN_ROOTS,
            });
        }
        let lam2 = self.lambda * self.lambda;
        for (l, &mu) in self.roots.iter().enumerate() {
            if !(mu > lam2) || (l > 0 && !(mu > self.roots[l - 1])) {
                return Err(Error::InvalidProblem(format!(
                    "root {l} out of order: {mu}"
                )));
            }
            let x = self.nu(l) * self.r;
            let (lo, hi) = match self.family {
                RootFamily::Robin => ((l as f64 + 0.5) * PI, (l as f64 + 1.0) * PI),
                RootFamily::Dirichlet => ((l as f64 + 1.0) * PI, (l as f64 + 1.0) * PI),
            };
            let slack = 1e-12 * hi;
            if x < lo - slack || x > hi + slack {
                return Err(Error::BracketFailure {
                    index: l,
                    lambda: self.lambda,
                    r: self.r,
                });
            }
        }
        let res = self.max_residual();
        if res > RESIDUAL_TOL {
            return Err(Error::InvalidProblem(format!(
                "root residual {res:e} exceeds {RESIDUAL_TOL:e}"
            )));
        }
        if self.family == RootFamily::Robin {
            check_tail_fit(&fit_tail(self)?, self.lambda * self.r)?;
        }
        Ok(())
    }
}

/// First `count` roots `μ > λ²` of `ν cos νr + λ sin νr = 0`, `ν = √(μ − λ²)`.
///
/// Writing `νr = (l + ½)π + δ` the equation becomes
/// `λr cos δ = ((l + ½)π + δ) sin δ` with a unique root `δ ∈ (0, π/2)`.
pub fn robin_mode_roots(lambda: f64, r: f64, count: usize) -> Result<RootSequence> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidProblem(format!(
            "r must be finite and > 0, got {r}"
        )));
    }
    if count == 0 {
        return Err(Error::InsufficientRoots { got: 0, need: 1 });
    }
    let beta = lambda * r;
    let mut roots = Vec::with_capacity(count);
    for l in 0..count {
        let x = (l as f64 + 0.5) * PI;
        let g = |d: f64| beta * d.cos() - (x + d) * d.sin();
        let (mut lo, mut hi) = (0.0f64, FRAC_PI_2);
        if !(g(lo) > 0.0 && g(hi) < 0.0) {
            return Err(Error::BracketFailure {
                index: l,
                lambda,
                r,
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let nu = (x + 0.5 * (lo + hi)) / r;
        debug_assert!((hi - lo) / r <= ROOT_TOL);
        roots.push(lambda * lambda + nu * nu);
    }
    let mut seq = RootSequence {
        lambda,
        r,
        roots,
        family: RootFamily::Robin,
        tail_params: TailParams::default(),
        count,
    };
    if count >= MIN_ROOTS {
        seq.tail_params = fit_tail(&seq)?;
    }
    Ok(seq)
}

/// Dirichlet–Dirichlet eigenvalues packaged as a root sequence.
pub fn dirichlet_root_sequence(lambda: f64, r: f64, count: usize) -> RootSequence {
    RootSequence {
        lambda,
        r,
        roots: dirichlet_mode_eigen(lambda, r, count),
        family: RootFamily::Dirichlet,
        tail_params: TailParams::default(),
        count,
    }
}

const TAIL_FIT_POINTS: usize = 12;

/// Least-squares fit of `δ_l X_l = a1 + a3 X_l^{-2} + a5 X_l^{-4}` on the last roots.
fn fit_tail(seq: &RootSequence) -> Result<TailParams> {
    let n = seq.roots.len();
    let k = TAIL_FIT_POINTS.min(n);
    let first = n - k;
    let mut design = DMatrix::<f64>::zeros(k, 3);
    let mut rhs = DVector::<f64>::zeros(k);
    for (row, l) in (first..n).enumerate() {
        let x = seq.base(l);
        let delta = seq.nu(l) * seq.r - x;
        let inv2 = 1.0 / (x * x);
        design[(row, 0)] = 1.0;
        design[(row, 1)] = inv2;
        design[(row, 2)] = inv2 * inv2;
        rhs[row] = delta * x;
    }
    let svd = design.svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::TailFitFailure(e.to_string()))?;
    Ok(TailParams {
        a1: sol[0],
        a3: sol[1],
    })
}

/// Analytic tail coefficients for `β = λr`: `a1 = β`, `a3 = −(β² + β³/3)`.
pub fn analytic_tail(beta: f64) -> TailParams {
    TailParams {
        a1: beta,
        a3: -(beta * beta + beta * beta * beta / 3.0),
    }
}

fn check_tail_fit(fit: &TailParams, beta: f64) -> Result<()> {
    let want = analytic_tail(beta);
    let e1 = (fit.a1 - want.a1).abs();
    let e3 = (fit.a3 - want.a3).abs();
    if !(e1 <= 1e-6 * (1.0 + beta.abs())) || !(e3 <= 1e-2 * (1.0 + want.a3.abs())) {
        return Err(Error::TailFitFailure(format!(
            "fitted (a1, a3) = ({:.6e}, {:.6e}) vs expected ({:.6e}, {:.6e})",
            fit.a1, fit.a3, want.a1, want.a3
        )));
    }
    Ok(())
}

/// `−ζ'_seq(0)` for `ζ_seq(s) = Σ_l μ_l^{-s}`, continued to `s = 0`.
///
/// With `ν_l = (π/r)(l + c + ε_l)`:
///
/// ```text
/// log Det = 2 log(π/r) ζ_H(0, c) − 2 ζ_H'(0, c)
///         + 2 Σ_l log(1 + ε_l/(l + c)) + Σ_l log(1 + λ²/ν_l²)
/// ```
///
/// Both convergent sums run over the explicit roots and are completed with
/// the analytic `X^{-2}`, `X^{-4}` tail, expressed through Hurwitz zetas.
pub fn mode_logdet_zeta(seq: &RootSequence) -> Result<f64> {
    let n = seq.roots.len();
    if n < MIN_ROOTS {
        return Err(Error::InsufficientRoots {
            got: n,
            need: MIN_ROOTS,
        });
    }
    let c = seq.offset();
    let beta = seq.lambda * seq.r;
    let tail = match seq.family {
        RootFamily::Robin => {
            let fit = fit_tail(seq)?;
            check_tail_fit(&fit, beta)?;
            analytic_tail(beta)
        }
        RootFamily::Dirichlet => TailParams::default(),
    };

    let mut acc = NeumaierSum::new();
    acc.add(2.0 * (PI / seq.r).ln() * hurwitz_zeta_real(0.0, c)?);
    acc.add(-2.0 * hurwitz_zeta_zero_deriv(c)?);
    for l in 0..n {
        let x = seq.base(l);
        let delta = match seq.family {
            RootFamily::Robin => seq.nu(l) * seq.r - x,
            RootFamily::Dirichlet => 0.0,
        };
        // ε_l / (l + c) = δ_l / X_l
        acc.add(2.0 * (delta / x).ln_1p());
        let y = beta / (x + delta);
        acc.add((y * y).ln_1p());
    }

    // Tail over l ≥ n: Σ X^{-2} = π^{-2} ζ_H(2, n + c), Σ X^{-4} = π^{-4} ζ_H(4, n + c).
    let s2 = hurwitz_zeta_real(2.0, n as f64 + c)? / (PI * PI);
    let s4 = hurwitz_zeta_real(4.0, n as f64 + c)? / (PI * PI * PI * PI);
    let b2 = beta * beta;
    let t1 = tail.a1 * s2 + (tail.a3 - 0.5 * tail.a1 * tail.a1) * s4;
    let t2 = b2 * s2 + (-2.0 * b2 * tail.a1 - 0.5 * b2 * b2) * s4;
    acc.add(2.0 * t1);
    acc.add(t2);
    Ok(acc.value())
}

/// `log(1 − e^{−2x})` for `x > 0`, accurate for small and large `x`.
pub fn log_one_minus_exp2(x: f64) -> f64 {
    if x > 0.35 {
        (-(-2.0 * x).exp()).ln_1p()
    } else {
        (-(-2.0 * x).exp_m1()).ln()
    }
}

/// Closed-form zeta log-determinant of a mode problem.
///
/// Normalization: `Det(D,D) = 2 sinh(λr)/λ` (`2r` at `λ = 0`),
/// `Det(D,RobinAbs) = 2 e^{λr}`, `Det(D,Neumann) = 2`.
pub fn mode_logdet_gy(problem: &ModeProblem) -> f64 {
    let ModeProblem { lambda, r, .. } = *problem;
    match problem.free_end() {
        ModeBc::Dirichlet => {
            if lambda == 0.0 {
                (2.0 * r).ln()
            } else {
                // log(2 sinh(λr)/λ) = λr + log(1 − e^{−2λr}) − log λ
                lambda * r + log_one_minus_exp2(lambda * r) - lambda.ln()
            }
        }
        ModeBc::RobinAbs | ModeBc::Neumann => std::f64::consts::LN_2 + lambda * r,
    }
}

/// Outward normal derivative at the near end of the solution of
/// `−φ'' + λ²φ = 0` with `φ(far) = 0`, `φ(near) = 1`: `λ coth(λr)`, or `1/r`.
pub fn mode_poisson_dtn(lambda: f64, r: f64, far_bc: ModeBc) -> Result<f64> {
    if far_bc != ModeBc::Dirichlet {
        return Err(Error::UnsupportedBoundary(format!(
            "far-end condition {far_bc:?}"
        )));
    }
    check_lambda_r(lambda, r)?;
    let lambda = lambda.abs();
    Ok(if r.is_infinite() {
        lambda
    } else if lambda == 0.0 {
        1.0 / r
    } else {
        lambda / (lambda * r).tanh()
    })
}

fn check_lambda_r(lambda: f64, r: f64) -> Result<()> {
    if !lambda.is_finite() {
        return Err(Error::InvalidProblem(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidProblem(format!("r must be > 0, got {r}")));
    }
    Ok(())
}

/// Independent shooting oracle for [`mode_poisson_dtn`]: classical RK4 on
/// `φ'' = λ²φ` from the far end with `φ = 0, φ' = 1`, returning `φ'/φ` at the
/// near end. Uses at least `min_steps` steps.
pub fn mode_poisson_dtn_shooting(lambda: f64, r: f64, min_steps: usize) -> Result<f64> {
    check_lambda_r(lambda, r)?;
    if !r.is_finite() {
        return Err(Error::InvalidProblem("shooting requires finite r".into()));
    }
    let steps = min_steps.max(10_000);
    let h = r / steps as f64;
    let l2 = lambda * lambda;
    let (mut y, mut v) = (0.0f64, 1.0f64);
    for _ in 0..steps {
        let k1y = v;
        let k1v = l2 * y;
        let k2y = v + 0.5 * h * k1v;
        let k2v = l2 * (y + 0.5 * h * k1y);
        let k3y = v + 0.5 * h * k2v;
        let k3v = l2 * (y + 0.5 * h * k2y);
        let k4y = v + h * k3v;
        let k4v = l2 * (y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    Ok(v / y)
}

/// `Q_λ = 2|λ| / (1 − e^{−2|λ|r})`, with `Q₀ = 1/r`.
pub fn mode_q_value(lambda: f64, r: f64) -> Result<f64> {
    check_lambda_r(lambda, r)?;
    let lambda = lambda.abs();
    Ok(if lambda == 0.0 {
        1.0 / r
    } else {
        2.0 * lambda / -(-2.0 * lambda * r).exp_m1()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_eigen_examples() {
        let v = dirichlet_mode_eigen(0.0, PI, 3);
        for (a, b) in v.iter().zip([1.0, 4.0, 9.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((dirichlet_mode_eigen(1.0, PI, 1)[0] - 2.0).abs() < 1e-14);
        let v = dirichlet_mode_eigen(2.0, 1.0, 2);
        assert!((v[0] - (4.0 + PI * PI)).abs() < 1e-13);
        assert!((v[1] - (4.0 + 4.0 * PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn first_robin_root() {
        let seq = robin_mode_roots(1.0, 1.0, 1).unwrap();
        // first positive root of tan x = −x
        assert!((seq.nu(0) - 2.028_757_838_110_434_5).abs() < 1e-13);
        assert!((seq.roots[0] - 5.115_858_365_694_523).abs() < 1e-12);
    }

    #[test]
    fn robin_roots_degenerate_to_neumann() {
        let seq = robin_mode_roots(1e-12, 1.0, 5).unwrap();
        for l in 0..5 {
            assert!((seq.nu(l) - (l as f64 + 0.5) * PI).abs() < 1e-10);
        }
    }

    #[test]
    fn robin_root_asymptotics() {
        let seq = robin_mode_roots(1.0, 1.0, 41).unwrap();
        for l in 20..=40 {
            let nu = seq.nu(l);
            let x = (l as f64 + 0.5) * PI;
            let rem = nu - x - 1.0 / nu;
            assert!(rem.abs() * nu.powi(3) < 2.0, "l = {l}: {rem:e}");
        }
    }

    #[test]
    fn robin_rejects_nonpositive_lambda() {
        assert!(matches!(
            robin_mode_roots(0.0, 1.0, 3),
            Err(Error::BracketFailure { .. })
        ));
        assert!(matches!(
            robin_mode_roots(-1.0, 1.0, 3),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn gy_examples() {
        let dd = |l, r| {
            mode_logdet_gy(&ModeProblem::new(l, r, ModeBc::Dirichlet, ModeBc::Dirichlet).unwrap())
        };
        let dr = |l, r| {
            mode_logdet_gy(&ModeProblem::new(l, r, ModeBc::Dirichlet, ModeBc::RobinAbs).unwrap())
        };
        assert!((dd(0.0, 3.0) - 6f64.ln()).abs() < 1e-15);
        assert!((dd(1.0, 1.0) - (2.0 * 1f64.sinh()).ln()).abs() < 1e-15);
        assert!((dr(1.0, 1.0) - (1.0 + 2f64.ln())).abs() < 1e-15);
        let dn = ModeProblem::new(0.0, 2.0, ModeBc::Neumann, ModeBc::Dirichlet).unwrap();
        assert!((mode_logdet_gy(&dn) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn problem_validation() {
        assert!(ModeProblem::new(1.0, 1.0, ModeBc::RobinAbs, ModeBc::RobinAbs).is_err());
        assert!(ModeProblem::new(1.0, 1.0, ModeBc::Dirichlet, ModeBc::Neumann).is_err());
        assert!(ModeProblem::new(1.0, 0.0, ModeBc::Dirichlet, ModeBc::Dirichlet).is_err());
        assert!(ModeProblem::new(-1.0, 1.0, ModeBc::Dirichlet, ModeBc::Dirichlet).is_err());
    }

    #[test]
    fn zeta_route_examples() {
        let v = mode_logdet_zeta(&dirichlet_root_sequence(0.0, 3.0, 40)).unwrap();
        assert!((v - 6f64.ln()).abs() < 1e-4);
        let v = mode_logdet_zeta(&robin_mode_roots(1.0, 1.0, 200).unwrap()).unwrap();
        assert!((v - (1.0 + 2f64.ln())).abs() < 1e-4);
        let v = mode_logdet_zeta(&robin_mode_roots(2.0, 0.5, 200).unwrap()).unwrap();
        assert!((v - (1.0 + 2f64.ln())).abs() < 1e-4);
    }

    #[test]
    fn zeta_route_needs_enough_roots() {
        let seq = robin_mode_roots(1.0, 1.0, 10).unwrap();
        assert!(matches!(
            mode_logdet_zeta(&seq),
            Err(Error::InsufficientRoots { got: 10, .. })
        ));
    }

    #[test]
    fn corrupted_tail_is_detected() {
        let mut seq = robin_mode_roots(1.0, 1.0, 60).unwrap();
        let n = seq.roots.len();
        for l in n - 6..n {
            seq.roots[l] += 1e-3 * (l as f64);
        }
        assert!(matches!(
            mode_logdet_zeta(&seq),
            Err(Error::TailFitFailure(_))
        ));
    }

    #[test]
    fn poisson_examples() {
        let d = mode_poisson_dtn(1.0, 1.0, ModeBc::Dirichlet).unwrap();
        assert!((d - 1.0 / 1f64.tanh()).abs() < 1e-15);
        assert_eq!(mode_poisson_dtn(0.0, 2.0, ModeBc::Dirichlet).unwrap(), 0.5);
        assert_eq!(
            mode_poisson_dtn(2.0, f64::INFINITY, ModeBc::Dirichlet).unwrap(),
            2.0
        );
        assert!(mode_poisson_dtn(1.0, 1.0, ModeBc::Neumann).is_err());
        let s = mode_poisson_dtn_shooting(1.0, 1.0, 10_000).unwrap();
        assert!((s - d).abs() < 1e-8);
        let s = mode_poisson_dtn_shooting(0.0, 2.0, 10_000).unwrap();
        assert!((s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn q_examples() {
        assert!((mode_q_value(1.0, 1.0).unwrap() - 2.0 / (1.0 - (-2f64).exp())).abs() < 1e-15);
        assert_eq!(mode_q_value(1.0, f64::INFINITY).unwrap(), 2.0);
        assert_eq!(mode_q_value(0.0, 4.0).unwrap(), 0.25);
    }

    #[test]
    fn root_sequence_json_round_trip() {
        let seq = robin_mode_roots(0.5, 2.0, 40).unwrap();
        let text = serde_json::to_string(&seq).unwrap();
        let back: RootSequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back, seq);
        back.validate().unwrap();
        let minimal: RootSequence = serde_json::from_str(&format!(
            r#"{{"lambda":0.5,"r":2.0,"roots":{}}}"#,
            serde_json::to_string(&seq.roots).unwrap()
        ))
        .unwrap();
        minimal.validate().unwrap();
    }
}
