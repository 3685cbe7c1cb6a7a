//! Model spectra of the tangential operator `B` and their spectral invariants.
//!
//! A [`TangentialModel`] stores the positive half of a symmetric spectrum:
//! every line `(λ, m)` stands for `m` eigenvalues at `+λ` and `m` at `−λ`.
//! Zero modes are carried separately as `kernel_dim` and are excluded from
//! every zeta function computed here.
//!
//! Arithmetic families have `|B|`-eigenvalues `d (n + a)` with multiplicity
//! `Σ_p c_p n^p` per sign. Writing `n = (n + a) − a` turns every zeta value into
//! a finite combination of Hurwitz zetas:
//!
//! ```text
//! ζ_{|B|}(s) = 2 d^{-s} Σ_q w_q ζ_H(s − q, a),   w_q = Σ_{p≥q} c_p C(p, q) (−a)^{p−q}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{
    hurwitz_finite_part_at_one, hurwitz_zeta, hurwitz_zeta_jet, hurwitz_zeta_zero_deriv,
    ZetaScheme, ZetaValue,
};
use crate::sum::NeumaierSum;

const MAX_DEGREE: usize = 3;
const MAX_MODES: usize = 20_000_000;

/// One magnitude of the symmetric spectrum, with multiplicity per sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenLine {
    pub lambda: f64,
    pub multiplicity: u64,
}

impl EigenLine {
    pub fn mult(&self) -> f64 {
        self.multiplicity as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumKind {
    /// Finite list of magnitudes. `truncation_growth` marks a truncation of an
    /// infinite spectrum, for which continuation below the growth exponent is
    /// unavailable.
    Explicit {
        lines: Vec<EigenLine>,
        truncation_growth: Option<f64>,
    },
    Arithmetic {
        offset: f64,
        gap: f64,
        mult: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentialModel {
    kind: SpectrumKind,
    kernel_dim: usize,
    /// Hurwitz weights `w_q` (arithmetic kind only).
    weights: Vec<f64>,
}

/// On-disk model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelFile {
    Arithmetic {
        a: f64,
        d: f64,
        mult: Vec<f64>,
        #[serde(default)]
        kernel: usize,
    },
    Explicit {
        lines: Vec<(f64, u64)>,
        #[serde(default)]
        kernel: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        growth: Option<f64>,
    },
}

/// Spectral invariants of `B` used throughout the assemblies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralInvariants {
    /// `ζ_{B²}(0)`
    pub zeta_b2_0: f64,
    /// `ζ'_{B²}(0)`
    pub zeta_b2_deriv_0: f64,
    /// `ζ_{|B|}(−1)`
    pub zeta_abs_b_m1: f64,
    /// `log Det B² = −ζ'_{B²}(0)`
    pub logdet_b2: f64,
    /// `ζ_{B²}(0) + dim Ker B`
    pub d_coefficient: f64,
    pub kernel_dim: usize,
    pub zeta_b2_0_err: f64,
    pub zeta_b2_deriv_0_err: f64,
    pub zeta_abs_b_m1_err: f64,
}

/// Result of [`TangentialModel::enumerate_modes`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeListing {
    pub lines: Vec<EigenLine>,
    pub kernel_dim: usize,
}

/// A tail zeta value `Σ_{n ≥ N} m λ^{-u}` (both signs), either regular or
/// the Laurent data `R/(u − u₀) + C` at a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailZeta {
    Regular {
        value: f64,
        est_error: f64,
    },
    Pole {
        residue: f64,
        finite: f64,
        est_error: f64,
    },
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "{name} must be finite, got {x}"
        )))
    }
}

impl TangentialModel {
    /// Arithmetic family `d (n + a)`, multiplicity `Σ_p mult[p] n^p` per sign.
    pub fn arithmetic(offset: f64, gap: f64, mult: Vec<f64>, kernel_dim: usize) -> Result<Self> {
        check_finite("a", offset)?;
        check_finite("d", gap)?;
        if !(offset > 0.0 && offset <= 1.0) {
            return Err(Error::InvalidModel(format!(
                "offset a must lie in (0, 1], got {offset}"
            )));
        }
        if !(gap > 0.0) {
            return Err(Error::InvalidModel(format!(
                "gap d must be positive, got {gap}"
            )));
        }
        let mut mult = mult;
        for c in &mult {
            check_finite("multiplicity coefficient", *c)?;
            if *c < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "multiplicity coefficients must be non-negative, got {c}"
                )));
            }
        }
        while mult.last() == Some(&0.0) {
            mult.pop();
        }
        if mult.is_empty() {
            return Err(Error::InvalidModel(
                "multiplicity polynomial is identically zero".into(),
            ));
        }
        let degree = mult.len() - 1;
        if degree > MAX_DEGREE {
            return Err(Error::DegreeTooHigh(degree));
        }
        // An integer-valued polynomial of degree p is determined by p + 1
        // consecutive integer values.
        for n in 0..=degree {
            let m = poly_eval(&mult, n as f64);
            if (m - m.round()).abs() > 1e-9 {
                return Err(Error::InvalidModel(format!(
                    "multiplicity polynomial is not integer-valued (m({n}) = {m})"
                )));
            }
        }
        let weights = (0..=degree)
            .map(|q| {
                (q..=degree)
                    .map(|p| mult[p] * binomial(p, q) * (-offset).powi((p - q) as i32))
                    .sum()
            })
            .collect();
        Ok(Self {
            kind: SpectrumKind::Arithmetic { offset, gap, mult },
            kernel_dim,
            weights,
        })
    }

    /// Finite symmetric spectrum `{±λ}` with per-sign multiplicities.
    pub fn explicit(lines: Vec<EigenLine>, kernel_dim: usize) -> Result<Self> {
        Self::build_explicit(lines, kernel_dim, None)
    }

    /// Finite list standing for a truncation of an infinite spectrum whose
    /// zeta function converges for `Re s > growth`.
    pub fn explicit_truncated(
        lines: Vec<EigenLine>,
        kernel_dim: usize,
        growth: f64,
    ) -> Result<Self> {
        check_finite("growth", growth)?;
        if !(growth > 0.0) {
            return Err(Error::InvalidModel(format!(
                "growth must be positive, got {growth}"
            )));
        }
        Self::build_explicit(lines, kernel_dim, Some(growth))
    }

    fn build_explicit(
        lines: Vec<EigenLine>,
        kernel_dim: usize,
        truncation_growth: Option<f64>,
    ) -> Result<Self> {
        let mut lines = lines;
        for l in &lines {
            check_finite("lambda", l.lambda)?;
            if !(l.lambda > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "explicit lines must have lambda > 0 (zero modes go in `kernel`), got {}",
                    l.lambda
                )));
            }
            if l.multiplicity == 0 {
                return Err(Error::InvalidModel(
                    "multiplicity must be at least 1".into(),
                ));
            }
        }
        lines.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        let mut merged: Vec<EigenLine> = Vec::with_capacity(lines.len());
        for l in lines {
            match merged.last_mut() {
                Some(last) if last.lambda == l.lambda => last.multiplicity += l.multiplicity,
                _ => merged.push(l),
            }
        }
        Ok(Self {
            kind: SpectrumKind::Explicit {
                lines: merged,
                truncation_growth,
            },
            kernel_dim,
            weights: Vec::new(),
        })
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        match file {
            ModelFile::Arithmetic { a, d, mult, kernel } => {
                Self::arithmetic(*a, *d, mult.clone(), *kernel)
            }
            ModelFile::Explicit {
                lines,
                kernel,
                growth,
            } => {
                let lines = lines
                    .iter()
                    .map(|&(lambda, multiplicity)| EigenLine {
                        lambda,
                        multiplicity,
                    })
                    .collect();
                match growth {
                    Some(g) => Self::explicit_truncated(lines, *kernel, *g),
                    None => Self::explicit(lines, *kernel),
                }
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidModel(format!("malformed model JSON: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> ModelFile {
        match &self.kind {
            SpectrumKind::Arithmetic { offset, gap, mult } => ModelFile::Arithmetic {
                a: *offset,
                d: *gap,
                mult: mult.clone(),
                kernel: self.kernel_dim,
            },
            SpectrumKind::Explicit {
                lines,
                truncation_growth,
            } => ModelFile::Explicit {
                lines: lines.iter().map(|l| (l.lambda, l.multiplicity)).collect(),
                kernel: self.kernel_dim,
                growth: *truncation_growth,
            },
        }
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, SpectrumKind::Explicit { .. })
    }

    /// Smallest σ with `Σ m λ^{-σ} < ∞` (in powers of `|λ|`).
    pub fn spectral_growth(&self) -> f64 {
        match &self.kind {
            SpectrumKind::Arithmetic { mult, .. } => mult.len() as f64,
            SpectrumKind::Explicit {
                truncation_growth, ..
            } => truncation_growth.unwrap_or(0.0),
        }
    }

    /// Smallest nonzero `|λ|`.
    pub fn lambda_min(&self) -> Option<f64> {
        self.lines().next().map(|l| l.lambda)
    }

    /// Multiplicity per sign of the n-th arithmetic level.
    fn arithmetic_mult(mult: &[f64], n: usize) -> u64 {
        poly_eval(mult, n as f64).round() as u64
    }

    /// Nonzero magnitudes in ascending order (infinite for arithmetic models).
    pub fn lines(&self) -> Box<dyn Iterator<Item = EigenLine> + '_> {
        match &self.kind {
            SpectrumKind::Explicit { lines, .. } => Box::new(lines.iter().copied()),
            SpectrumKind::Arithmetic { offset, gap, mult } => Box::new(
                (0..)
                    .map(move |n: usize| EigenLine {
                        lambda: gap * (n as f64 + offset),
                        multiplicity: Self::arithmetic_mult(mult, n),
                    })
                    .filter(|l| l.multiplicity > 0),
            ),
        }
    }

    /// All lines with `|λ| ≤ lambda_max`, ascending; kernel reported separately.
    pub fn enumerate_modes(&self, lambda_max: f64) -> ModeListing {
        let lines = self
            .lines()
            .take_while(|l| l.lambda <= lambda_max)
            .collect();
        ModeListing {
            lines,
            kernel_dim: self.kernel_dim,
        }
    }

    fn check_continuation(&self, s: Complex64) -> Result<()> {
        if let SpectrumKind::Explicit {
            truncation_growth: Some(g),
            ..
        } = &self.kind
        {
            if s.re <= *g {
                return Err(Error::ContinuationUnavailable(s.re));
            }
        }
        Ok(())
    }

    /// `ζ_{|B|}(s)` with its `s`-derivative and error estimate.
    fn zeta_abs_b_jet(&self, s: Complex64) -> Result<(Complex64, Complex64, f64)> {
        self.check_continuation(s)?;
        match &self.kind {
            SpectrumKind::Explicit { lines, .. } => {
                let mut re = NeumaierSum::new();
                let mut im = NeumaierSum::new();
                let mut dre = NeumaierSum::new();
                let mut dim = NeumaierSum::new();
                let mut mag = 0.0;
                for l in lines {
                    let ll = l.lambda.ln();
                    let term = (-s * ll).exp() * (2.0 * l.mult());
                    re.add(term.re);
                    im.add(term.im);
                    let dterm = -term * ll;
                    dre.add(dterm.re);
                    dim.add(dterm.im);
                    mag += term.norm() * (1.0 + ll.abs());
                }
                let value = Complex64::new(re.value(), im.value());
                let deriv = Complex64::new(dre.value(), dim.value());
                Ok((value, deriv, 2.0 * f64::EPSILON * mag))
            }
            SpectrumKind::Arithmetic { offset, gap, .. } => {
                let ln_d = gap.ln();
                let scale = (-s * ln_d).exp() * 2.0; // 2 d^{-s}
                let mut value = Complex64::new(0.0, 0.0);
                let mut deriv = Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                for (q, &w) in self.weights.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let u = s - q as f64;
                    let (h, dh, e) = hurwitz_value_deriv(u, *offset)?;
                    value += scale * w * h;
                    deriv += scale * w * (dh - h * ln_d);
                    err += scale.norm() * w.abs() * e;
                }
                err += 4.0 * f64::EPSILON * value.norm();
                Ok((value, deriv, err))
            }
        }
    }

    fn scheme(&self) -> ZetaScheme {
        match self.kind {
            SpectrumKind::Explicit { .. } => ZetaScheme::FiniteSum,
            SpectrumKind::Arithmetic { .. } => ZetaScheme::ClosedFormHurwitz,
        }
    }

    /// `ζ_{|B|}(s) = Σ_{λ≠0} m |λ|^{-s}` over both signs.
    pub fn zeta_abs_b(&self, s: Complex64) -> Result<ZetaValue> {
        let (value, _, est_error) = self.zeta_abs_b_jet(s)?;
        Ok(ZetaValue {
            s,
            value,
            scheme: self.scheme(),
            est_error,
        })
    }

    /// Sum over the positive eigenvalues only; half of [`Self::zeta_abs_b`].
    pub fn half_zeta_abs_b(&self, s: Complex64) -> Result<ZetaValue> {
        let full = self.zeta_abs_b(s)?;
        Ok(ZetaValue {
            value: full.value * 0.5,
            est_error: full.est_error * 0.5,
            ..full
        })
    }

    /// `ζ_{B²}(s) = ζ_{|B|}(2s)`, evaluated through the same code path.
    pub fn zeta_b2(&self, s: Complex64) -> Result<ZetaValue> {
        let inner = self.zeta_abs_b(s * 2.0)?;
        Ok(ZetaValue { s, ..inner })
    }

    /// `ζ'_{B²}(s) = 2 ζ'_{|B|}(2s)` with its error estimate.
    pub fn zeta_b2_deriv(&self, s: Complex64) -> Result<(Complex64, f64)> {
        let (_, d, e) = self.zeta_abs_b_jet(s * 2.0)?;
        Ok((d * 2.0, 2.0 * e))
    }

    /// `log Det B² = −ζ'_{B²}(0)`.
    pub fn logdet_b2(&self) -> Result<f64> {
        Ok(-self.zeta_b2_deriv(Complex64::new(0.0, 0.0))?.0.re)
    }

    /// `d_{m−1} = ζ_{B²}(0) + dim Ker B`.
    pub fn d_coefficient(&self) -> Result<f64> {
        Ok(self.zeta_b2(Complex64::new(0.0, 0.0))?.value.re + self.kernel_dim as f64)
    }

    pub fn invariants(&self) -> Result<SpectralInvariants> {
        let zero = Complex64::new(0.0, 0.0);
        let z0 = self.zeta_b2(zero)?;
        let (dz0, dz0_err) = self.zeta_b2_deriv(zero)?;
        let zm1 = self.zeta_abs_b(Complex64::new(-1.0, 0.0))?;
        Ok(SpectralInvariants {
            zeta_b2_0: z0.value.re,
            zeta_b2_deriv_0: dz0.re,
            zeta_abs_b_m1: zm1.value.re,
            logdet_b2: -dz0.re,
            d_coefficient: z0.value.re + self.kernel_dim as f64,
            kernel_dim: self.kernel_dim,
            zeta_b2_0_err: z0.est_error,
            zeta_b2_deriv_0_err: dz0_err,
            zeta_abs_b_m1_err: zm1.est_error,
        })
    }

    /// Number of leading arithmetic levels (`n < N`) with `λ_n ≤ lambda_cut`.
    pub(crate) fn levels_below(&self, lambda_cut: f64) -> usize {
        match &self.kind {
            SpectrumKind::Arithmetic { offset, gap, .. } => {
                let n = (lambda_cut / gap - offset).floor() + 1.0;
                if n <= 0.0 {
                    0
                } else {
                    n as usize
                }
            }
            SpectrumKind::Explicit { lines, .. } => {
                lines.iter().take_while(|l| l.lambda <= lambda_cut).count()
            }
        }
    }

    /// Level `n` of an arithmetic model, including zero-multiplicity levels.
    pub(crate) fn arithmetic_level(&self, n: usize) -> Option<EigenLine> {
        match &self.kind {
            SpectrumKind::Arithmetic { offset, gap, mult } => Some(EigenLine {
                lambda: gap * (n as f64 + offset),
                multiplicity: Self::arithmetic_mult(mult, n),
            }),
            SpectrumKind::Explicit { .. } => None,
        }
    }

    /// `Σ_{n ≥ first} m_n λ_n^{-u}` over both signs for an arithmetic model,
    /// continued in `u`; at poles returns the Laurent data.
    pub(crate) fn arithmetic_tail_zeta(&self, first: usize, u: f64) -> Result<TailZeta> {
        let SpectrumKind::Arithmetic { offset, gap, .. } = &self.kind else {
            return Err(Error::InvalidModel(
                "tail zeta requires an arithmetic model".into(),
            ));
        };
        let shifted = offset + first as f64;
        let ln_d = gap.ln();
        let scale = 2.0 * (-u * ln_d).exp();
        let mut value = NeumaierSum::new();
        let mut residue = 0.0;
        let mut err = 0.0;
        let mut pole = false;
        for (q, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let arg = u - q as f64;
            if (arg - 1.0).abs() < 1e-12 {
                pole = true;
                residue += scale * w;
                // d^{-u} expanded about the pole contributes −ln d to the finite part.
                value.add(scale * w * (hurwitz_finite_part_at_one(shifted)? - ln_d));
                err += scale * w.abs() * 1e-14;
            } else {
                let h = hurwitz_zeta(Complex64::new(arg, 0.0), shifted)?;
                value.add(scale * w * h.value.re);
                err += scale * w.abs() * h.est_error;
            }
        }
        Ok(if pole {
            TailZeta::Pole {
                residue,
                finite: value.value(),
                est_error: err,
            }
        } else {
            TailZeta::Regular {
                value: value.value(),
                est_error: err,
            }
        })
    }

    /// Walks the spectrum in ascending order, calling `visit` on each line,
    /// until the remaining lines are certified below `tol` by `envelope`.
    ///
    /// `envelope(λ)` must bound the per-unit-multiplicity contribution of
    /// every line at or above `λ` and decrease in `λ`. Returns the tail bound.
    pub(crate) fn walk_lines<F, E>(&self, tol: f64, envelope: E, mut visit: F) -> Result<f64>
    where
        F: FnMut(&EigenLine) -> Result<()>,
        E: Fn(f64) -> f64,
    {
        match &self.kind {
            SpectrumKind::Explicit { lines, .. } => {
                for l in lines {
                    visit(l)?;
                }
                Ok(0.0)
            }
            SpectrumKind::Arithmetic { .. } => {
                let bound = |n: usize| -> f64 {
                    let l = self.arithmetic_level(n).expect("arithmetic");
                    l.mult() * envelope(l.lambda)
                };
                let mut n = 0usize;
                loop {
                    let line = self.arithmetic_level(n).expect("arithmetic");
                    if line.multiplicity > 0 {
                        visit(&line)?;
                    }
                    let b1 = bound(n + 1);
                    let b2 = bound(n + 2);
                    if b1 == 0.0 && b2 == 0.0 && envelope(line.lambda) == 0.0 {
                        return Ok(0.0);
                    }
                    if b1 > 0.0 {
                        let q = b2 / b1;
                        if q < 1.0 {
                            let tail = b1 / (1.0 - q);
                            if tail < tol {
                                return Ok(tail);
                            }
                        }
                    }
                    n += 1;
                    if n > MAX_MODES {
                        return Err(Error::Convergence(format!(
                            "more than {MAX_MODES} modes needed to reach tolerance {tol:e}"
                        )));
                    }
                }
            }
        }
    }
}

/// `(ζ_H(u, a), ∂_u ζ_H(u, a), error)`, using the exact Bernoulli route for
/// the value at non-positive integers and log-gamma for the derivative at 0.
fn hurwitz_value_deriv(u: Complex64, a: f64) -> Result<(Complex64, Complex64, f64)> {
    let v = hurwitz_zeta(u, a)?;
    if u == Complex64::new(0.0, 0.0) {
        let d = hurwitz_zeta_zero_deriv(a)?;
        return Ok((
            v.value,
            Complex64::new(d, 0.0),
            v.est_error + 1e-15 * (1.0 + d.abs()),
        ));
    }
    let jet = hurwitz_zeta_jet(u, a)?;
    Ok((v.value, jet.deriv, v.est_error.max(jet.est_error)))
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn half_integer() -> TangentialModel {
        TangentialModel::arithmetic(0.5, 1.0, vec![1.0], 0).unwrap()
    }

    fn integer() -> TangentialModel {
        TangentialModel::arithmetic(1.0, 1.0, vec![1.0], 0).unwrap()
    }

    fn one_two() -> TangentialModel {
        TangentialModel::explicit(
            vec![
                EigenLine {
                    lambda: 1.0,
                    multiplicity: 1,
                },
                EigenLine {
                    lambda: 2.0,
                    multiplicity: 1,
                },
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn zeta_b2_at_zero_examples() {
        assert!(half_integer().zeta_b2(c(0.0)).unwrap().value.norm() < 1e-15);
        assert!((integer().zeta_b2(c(0.0)).unwrap().value.re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn logdet_examples() {
        assert!((half_integer().logdet_b2().unwrap() - 2.0 * 2f64.ln()).abs() < 1e-13);
        assert!((integer().logdet_b2().unwrap() - 2.0 * (2.0 * PI).ln()).abs() < 1e-13);
        assert!((one_two().logdet_b2().unwrap() - 16f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn zeta_abs_b_examples() {
        let v = half_integer().zeta_abs_b(c(-1.0)).unwrap().value.re;
        assert!((v - 1.0 / 12.0).abs() < 1e-15);
        let v = one_two().zeta_abs_b(c(-1.0)).unwrap().value.re;
        assert_eq!(v, 6.0);
        for s in [-1.0, 0.0, 2.5] {
            let m = half_integer();
            let h = m.half_zeta_abs_b(c(s)).unwrap().value;
            let f = m.zeta_abs_b(c(s)).unwrap().value;
            assert_eq!(h * 2.0, f);
        }
    }

    #[test]
    fn zeta_b2_is_bit_identical_to_zeta_abs_b_at_double_argument() {
        let m = TangentialModel::arithmetic(0.3, 1.7, vec![1.0, 2.0], 1).unwrap();
        for s in [-0.75, 0.0, 0.3, 1.6] {
            let a = m.zeta_b2(c(s)).unwrap().value;
            let b = m.zeta_abs_b(c(2.0 * s)).unwrap().value;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn enumerate_examples() {
        let l = half_integer().enumerate_modes(2.0);
        assert_eq!(
            l.lines.iter().map(|l| l.lambda).collect::<Vec<_>>(),
            vec![0.5, 1.5]
        );
        assert!(l.lines.iter().all(|l| l.multiplicity == 1));
        let l = one_two().enumerate_modes(1.5);
        assert_eq!(
            l.lines,
            vec![EigenLine {
                lambda: 1.0,
                multiplicity: 1
            }]
        );
        let m = TangentialModel::arithmetic(1.0, 1.0, vec![1.0, 1.0], 0).unwrap();
        let l = m.enumerate_modes(3.0);
        let got: Vec<_> = l.lines.iter().map(|l| (l.lambda, l.multiplicity)).collect();
        assert_eq!(got, vec![(1.0, 1), (2.0, 2), (3.0, 3)]);
    }

    #[test]
    fn model_validation() {
        assert!(TangentialModel::arithmetic(0.0, 1.0, vec![1.0], 0).is_err());
        assert!(TangentialModel::arithmetic(1.5, 1.0, vec![1.0], 0).is_err());
        assert!(TangentialModel::arithmetic(0.5, -1.0, vec![1.0], 0).is_err());
        assert!(TangentialModel::arithmetic(0.5, 1.0, vec![0.0, 0.0], 0).is_err());
        assert!(TangentialModel::arithmetic(0.5, 1.0, vec![-1.0], 0).is_err());
        assert!(matches!(
            TangentialModel::arithmetic(0.5, 1.0, vec![1.0, 0.0, 0.0, 0.0, 1.0], 0),
            Err(Error::DegreeTooHigh(4))
        ));
        assert!(TangentialModel::arithmetic(0.5, 1.0, vec![0.5], 0).is_err());
        // n(n+1)/2 is integer-valued
        assert!(TangentialModel::arithmetic(0.5, 1.0, vec![0.0, 0.5, 0.5], 0).is_ok());
        assert!(TangentialModel::explicit(
            vec![EigenLine {
                lambda: 0.0,
                multiplicity: 1
            }],
            0
        )
        .is_err());
    }

    #[test]
    fn json_parsing() {
        let m = TangentialModel::from_json(
            r#"{"kind":"arithmetic","a":0.5,"d":1.0,"mult":[1],"kernel":0}"#,
        )
        .unwrap();
        assert_eq!(m, half_integer());
        let m = TangentialModel::from_json(
            r#"{"kind":"explicit","lines":[[1.0,1],[2.0,1]],"kernel":0}"#,
        )
        .unwrap();
        assert_eq!(m, one_two());
        assert!(TangentialModel::from_json(r#"{"kind":"explicit","lines":[[NaN,1]]}"#).is_err());
        assert!(TangentialModel::from_json(r#"{"kind":"bogus"}"#).is_err());
        assert!(TangentialModel::from_json("not json").is_err());
    }

    #[test]
    fn truncated_explicit_refuses_continuation() {
        let m = TangentialModel::explicit_truncated(
            vec![EigenLine {
                lambda: 1.0,
                multiplicity: 1,
            }],
            0,
            1.0,
        )
        .unwrap();
        assert!(matches!(
            m.zeta_b2(c(0.0)),
            Err(Error::ContinuationUnavailable(_))
        ));
        assert!(m.zeta_b2(c(2.0)).is_ok());
    }

    #[test]
    fn degree_one_pole_is_reported() {
        // mult n+1, a = 1/2: Σ (n+1)(n+1/2)^{-s} has a pole at s = 2
        let m = TangentialModel::arithmetic(0.5, 1.0, vec![1.0, 1.0], 0).unwrap();
        assert!(matches!(m.zeta_abs_b(c(2.0)), Err(Error::PoleAtOne(_))));
        assert!(m.zeta_abs_b(c(2.5)).is_ok());
    }

    #[test]
    fn polynomial_multiplicity_matches_riemann_shift() {
        // λ = n+1, mult n+1: ζ_{|B|}(s) = 2 ζ(s − 1); ζ(−1) = −1/12, ζ'(−1) known.
        let m = TangentialModel::arithmetic(1.0, 1.0, vec![1.0, 1.0], 0).unwrap();
        let z = m.zeta_abs_b(c(0.0)).unwrap().value.re;
        assert!((z + 1.0 / 6.0).abs() < 1e-14);
        let glaisher = 1.282_427_129_100_622_6f64;
        let expected = -2.0 * 2.0 * (1.0 / 12.0 - glaisher.ln());
        assert!((m.logdet_b2().unwrap() - expected).abs() < 1e-11);
    }
}
