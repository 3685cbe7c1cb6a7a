//! Special functions: log-gamma, digamma and the Hurwitz zeta function.
//!
//! The Hurwitz zeta is evaluated by Euler–Maclaurin summation with an
//! explicit head/tail split, carrying the derivative in `s` alongside the
//! value (dual-number style) so that `∂_s ζ(s, a)` at non-positive integers is
//! available for spectra with polynomial multiplicities.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// `B_{2j} / (2j)!` for j = 1..=20.
const BERNOULLI_OVER_FACTORIAL: [f64; 20] = [
    0.08333333333333333,
    -0.001388888888888889,
    3.306878306878307e-05,
    -8.267195767195768e-07,
    2.08767569878681e-08,
    -5.284190138687493e-10,
    1.3382536530684679e-11,
    -3.3896802963225827e-13,
    8.586062056277845e-15,
    -2.174868698558062e-16,
    5.5090028283602295e-18,
    -1.3954464685812522e-19,
    3.534707039629467e-21,
    -8.953517427037546e-23,
    2.267952452337683e-24,
    -5.744790668872202e-26,
    1.455172475614865e-27,
    -3.6859949406653103e-29,
    9.336734257095045e-31,
    -2.36502241570063e-32,
];

/// Exact Bernoulli numbers `B_{2k}` for the Stirling series, k = 1..=8.
const BERNOULLI_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// How a zeta value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaScheme {
    ClosedFormHurwitz,
    EulerMaclaurin,
    FiniteSum,
}

/// A computed zeta value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaValue {
    pub s: Complex64,
    pub value: Complex64,
    pub scheme: ZetaScheme,
    pub est_error: f64,
}

impl ZetaValue {
    /// Real part, for real arguments on real spectra.
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

/// Value and `s`-derivative of a Hurwitz zeta evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzJet {
    pub value: Complex64,
    pub deriv: Complex64,
    pub est_error: f64,
}

/// `ln Γ(x)` for real `x > 0`.
///
/// Shifts the argument up to `x ≥ 15` and applies the Stirling series with
/// eight Bernoulli corrections; relative error is below 1e-14 away from the
/// zeros at x = 1, 2 where the absolute error is below 1e-14.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 15.0 {
        shift += y.ln();
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += b / (two_k * (two_k - 1.0)) * pow;
        pow *= inv2;
    }
    Ok((y - 0.5) * y.ln() - y + LN_SQRT_2PI + series - shift)
}

/// Digamma `ψ(x)` for real `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 15.0 {
        shift += 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    let mut pow = inv2;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += b / two_k * pow;
        pow *= inv2;
    }
    Ok(y.ln() - 0.5 / y - series - shift)
}

fn check_args(s: Complex64, a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "Hurwitz zeta requires a > 0, got {a}"
        )));
    }
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Domain(format!("non-finite s = {s}")));
    }
    let dist = (s - 1.0).norm();
    if dist < 1e-8 {
        return Err(Error::PoleAtOne(dist));
    }
    Ok(())
}

fn is_nonpositive_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re.fract() == 0.0 && s.re >= -38.0
}

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (n + a)^{-s}`, analytically continued.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<ZetaValue> {
    check_args(s, a)?;
    let jet = if is_nonpositive_integer(s) {
        // The Bernoulli series terminates: exact polynomial in a.
        euler_maclaurin(s, a, 0, false)
    } else {
        euler_maclaurin(s, a, head_len(s, a), true)
    };
    Ok(ZetaValue {
        s,
        value: jet.value,
        scheme: ZetaScheme::EulerMaclaurin,
        est_error: jet.est_error,
    })
}

/// Real-argument convenience wrapper around [`hurwitz_zeta`].
pub fn hurwitz_zeta_real(s: f64, a: f64) -> Result<f64> {
    Ok(hurwitz_zeta(Complex64::new(s, 0.0), a)?.value.re)
}

/// Value and `s`-derivative of `ζ(s, a)`.
pub fn hurwitz_zeta_jet(s: Complex64, a: f64) -> Result<HurwitzJet> {
    check_args(s, a)?;
    Ok(euler_maclaurin(s, a, head_len(s, a), true))
}

/// `∂_s ζ(s, a)` at `s = 0`, i.e. `ln Γ(a) − ½ ln 2π`.
pub fn hurwitz_zeta_zero_deriv(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "Hurwitz zeta requires a > 0, got {a}"
        )));
    }
    Ok(ln_gamma(a)? - LN_SQRT_2PI)
}

/// Constant term of `ζ(1 + ε, a) = 1/ε + C + O(ε)`, namely `C = −ψ(a)`.
pub fn hurwitz_finite_part_at_one(a: f64) -> Result<f64> {
    Ok(-digamma(a)?)
}

fn head_len(s: Complex64, a: f64) -> usize {
    let x_min = 10.0 + s.norm();
    if a >= x_min {
        0
    } else {
        (x_min - a).ceil() as usize
    }
}

fn euler_maclaurin(s: Complex64, a: f64, head: usize, full_series: bool) -> HurwitzJet {
    let eps = f64::EPSILON;
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;

    for n in 0..head {
        let x = n as f64 + a;
        let lx = x.ln();
        let term = (-s * lx).exp();
        value += term;
        deriv -= term * lx;
        magnitude += term.norm() * (1.0 + lx.abs());
    }

    let x = head as f64 + a;
    let lx = x.ln();
    let x_pow = (-s * lx).exp(); // x^{-s}
    let sm1 = s - 1.0;
    let t1 = x_pow * x / sm1;
    let dt1 = -t1 * lx - t1 / sm1;
    let t2 = x_pow * 0.5;
    let dt2 = -t2 * lx;
    value += t1 + t2;
    deriv += dt1 + dt2;
    magnitude += t1.norm() * (1.0 + lx.abs()) + t2.norm() * (1.0 + lx.abs());

    // Pochhammer (s)_{2j-1} and its s-derivative, updated in place.
    let mut poch = s;
    let mut dpoch = Complex64::new(1.0, 0.0);
    let mut xp = x_pow / x; // x^{-s-1}
    let inv_x2 = 1.0 / (x * x);
    let mut last = 0.0;
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if !full_series && poch.norm() == 0.0 {
            last = 0.0;
            break;
        }
        let term = poch * xp * *c;
        let dterm = (dpoch - poch * lx) * xp * *c;
        value += term;
        deriv += dterm;
        magnitude += term.norm();
        last = term
            .norm()
            .max(if full_series { dterm.norm() } else { 0.0 });
        let k = 2.0 * j as f64 + 1.0;
        let f1 = s + k;
        let f2 = s + k + 1.0;
        dpoch = dpoch * f1 * f2 + poch * (f1 + f2);
        poch = poch * f1 * f2;
        xp *= inv_x2;
    }
    let est_error = last + 4.0 * eps * magnitude + eps * value.norm();
    HurwitzJet {
        value,
        deriv,
        est_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-14);
        let half = ln_gamma(0.5).unwrap() - 0.5 * PI.ln();
        assert!(half.abs() < 1e-14);
        // ln 10! = 15.104412573075516
        assert!((ln_gamma(11.0).unwrap() - 15.104_412_573_075_516).abs() < 1e-13);
        // Γ(0.1) = 9.513507698668732
        let rel = (ln_gamma(0.1).unwrap().exp() - 9.513_507_698_668_732).abs() / 9.5135;
        assert!(rel < 1e-13);
    }

    #[test]
    fn ln_gamma_rejects_nonpositive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(ln_gamma(-1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn digamma_known_values() {
        let euler_gamma = 0.577_215_664_901_532_9;
        assert!((digamma(1.0).unwrap() + euler_gamma).abs() < 1e-14);
        let half = -euler_gamma - 2.0 * 2f64.ln();
        assert!((digamma(0.5).unwrap() - half).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_examples() {
        assert!(hurwitz_zeta(c(0.0), 0.5).unwrap().value.norm() < 1e-15);
        let m1 = hurwitz_zeta(c(-1.0), 1.0).unwrap().value.re;
        assert!((m1 + 1.0 / 12.0).abs() < 1e-15);
        let two = hurwitz_zeta(c(2.0), 1.0).unwrap();
        assert!((two.value.re - PI * PI / 6.0).abs() < 1e-14);
        assert!(two.est_error <= 1e-12);
        assert!(two.est_error > 0.0);
    }

    #[test]
    fn hurwitz_errors() {
        assert!(matches!(
            hurwitz_zeta(c(1.0), 1.0),
            Err(Error::PoleAtOne(_))
        ));
        assert!(matches!(
            hurwitz_zeta(c(1.0 + 1e-9), 1.0),
            Err(Error::PoleAtOne(_))
        ));
        assert!(matches!(hurwitz_zeta(c(2.0), 0.0), Err(Error::Domain(_))));
        assert!(matches!(hurwitz_zeta(c(2.0), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn hurwitz_zero_deriv_examples() {
        let ln2pi_half = 0.5 * (2.0 * PI).ln();
        assert!((hurwitz_zeta_zero_deriv(1.0).unwrap() + ln2pi_half).abs() < 1e-14);
        assert!((hurwitz_zeta_zero_deriv(0.5).unwrap() + 0.5 * 2f64.ln()).abs() < 1e-14);
        assert!((hurwitz_zeta_zero_deriv(2.0).unwrap() + ln2pi_half).abs() < 1e-14);
    }

    #[test]
    fn jet_derivative_agrees_with_log_gamma_route() {
        for &a in &[0.1, 0.5, 1.0, 2.5, 7.0] {
            let jet = hurwitz_zeta_jet(c(0.0), a).unwrap();
            let lg = hurwitz_zeta_zero_deriv(a).unwrap();
            assert!((jet.deriv.re - lg).abs() < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn jet_derivative_matches_central_difference() {
        // ζ'(-1, 1) = 1/12 − ln A (Glaisher), A = 1.2824271291006226
        let jet = hurwitz_zeta_jet(c(-1.0), 1.0).unwrap();
        let expected = 1.0 / 12.0 - 1.282_427_129_100_622_6f64.ln();
        assert!((jet.deriv.re - expected).abs() < 1e-12);
        let h = 1e-5;
        let fd = (hurwitz_zeta_real(-1.0 + h, 1.0).unwrap()
            - hurwitz_zeta_real(-1.0 - h, 1.0).unwrap())
            / (2.0 * h);
        assert!((fd - expected).abs() < 1e-8);
    }

    #[test]
    fn finite_part_at_one() {
        // ζ(1+ε, 1) − 1/ε → γ
        let s = 1.0 + 1e-6;
        let eps = s - 1.0;
        let v = hurwitz_zeta_real(s, 1.0).unwrap() - 1.0 / eps;
        let fp = hurwitz_finite_part_at_one(1.0).unwrap();
        assert!((v - fp).abs() < 1e-6);
    }

    #[test]
    fn complex_argument_conjugate_symmetry() {
        let s = Complex64::new(0.3, 2.0);
        let a = hurwitz_zeta(s, 0.7).unwrap().value;
        let b = hurwitz_zeta(s.conj(), 0.7).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-13);
    }
}
