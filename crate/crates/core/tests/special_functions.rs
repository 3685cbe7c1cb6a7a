//! Special functions against high-precision reference values.

use num_complex::Complex64;
use zetadet::special::{
    digamma, hurwitz_finite_part_at_one, hurwitz_zeta, hurwitz_zeta_jet, hurwitz_zeta_real,
    hurwitz_zeta_zero_deriv, ln_gamma,
};
use zetadet::Error;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn hurwitz_reference_values() {
    let cases = [
        (-1.5, 0.3, -0.008_185_560_485_835_976_057_235_390_790_44),
        (0.5, 0.7, -1.010_536_559_935_124_442_838_935_125_39),
        (2.5, 1.3, 0.783_218_553_908_237_289_785_940_069_156),
        (-2.0, 0.25, -0.015_625),
        (3.0, 0.1, 1_000.930_728_689_171_836_611_025_415_01),
    ];
    for (s, a, want) in cases {
        let got = hurwitz_zeta_real(s, a).unwrap();
        assert!(
            (got - want).abs() <= 1e-12 * want.abs().max(1.0),
            "s={s} a={a}: {got} vs {want}"
        );
    }
}

#[test]
fn hurwitz_derivative_reference() {
    let jet = hurwitz_zeta_jet(c(-1.5), 0.3).unwrap();
    assert!((jet.deriv.re - 0.030_041_790_172_639_776_601_561_271_400_4).abs() < 1e-12);
    assert!(jet.deriv.im.abs() < 1e-15);
}

#[test]
fn derivative_at_zero_matches_log_gamma() {
    for i in 1..=15 {
        let a = 0.17 * i as f64;
        let jet = hurwitz_zeta_jet(c(0.0), a).unwrap();
        let closed = hurwitz_zeta_zero_deriv(a).unwrap();
        assert!((jet.deriv.re - closed).abs() < 1e-12, "a={a}");
    }
}

#[test]
fn riemann_special_values() {
    let z2 = hurwitz_zeta_real(2.0, 1.0).unwrap();
    assert!((z2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
    let zm1 = hurwitz_zeta_real(-1.0, 1.0).unwrap();
    assert!((zm1 + 1.0 / 12.0).abs() < 1e-15);
}

#[test]
fn complex_argument_matches_conjugate() {
    let s = Complex64::new(0.4, 3.0);
    let a = hurwitz_zeta(s, 0.6).unwrap().value;
    let b = hurwitz_zeta(s.conj(), 0.6).unwrap().value;
    assert!((a - b.conj()).norm() < 1e-13);
}

#[test]
fn pole_and_domain_errors() {
    assert!(matches!(
        hurwitz_zeta_real(1.0, 0.5),
        Err(Error::PoleAtOne(_))
    ));
    assert!(hurwitz_zeta_real(2.0, 0.0).is_err());
    assert!(ln_gamma(0.0).is_err());
    assert!(digamma(-1.0).is_err());
}

#[test]
fn gamma_family() {
    assert!((ln_gamma(0.5).unwrap() - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
    assert!(ln_gamma(1.0).unwrap().abs() < 1e-14);
    assert!((ln_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-12);
    let euler_gamma = 0.577_215_664_901_532_9;
    assert!((digamma(1.0).unwrap() + euler_gamma).abs() < 1e-14);
    assert!((hurwitz_finite_part_at_one(1.0).unwrap() - euler_gamma).abs() < 1e-13);
}
