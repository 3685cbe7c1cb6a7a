//! One-dimensional mode problems: roots, determinants and oracles.

use std::f64::consts::PI;

use zetadet::modes::{
    analytic_tail, dirichlet_root_sequence, mode_logdet_gy, mode_logdet_zeta, mode_poisson_dtn,
    mode_poisson_dtn_shooting, mode_q_value, robin_mode_roots, ModeBc, ModeProblem, RootSequence,
};

#[test]
fn robin_roots_reference() {
    let cases = [
        (
            0.5,
            2.0,
            [
                1.278_964_591_423_630_709_335_661_212_24,
                6.284_835_507_611_389_196_916_352_531_87,
                272.780_589_309_178_328_772_421_606_118,
            ],
        ),
        (
            2.0,
            0.5,
            [
                20.463_433_462_778_091_349_370_579_395_8,
                100.557_368_121_782_227_150_661_640_51,
                4_364.489_428_946_853_260_358_745_697_89,
            ],
        ),
    ];
    for (lambda, r, want) in cases {
        let seq = robin_mode_roots(lambda, r, 40).unwrap();
        for (l, w) in [0usize, 1, 10].into_iter().zip(want) {
            assert!(
                (seq.roots[l] - w).abs() < 1e-12 * w,
                "λ={lambda} r={r} l={l}"
            );
        }
        seq.validate().unwrap();
    }
}

#[test]
fn robin_roots_interlace_dirichlet() {
    let (lambda, r) = (1.3, 0.8);
    let rob = robin_mode_roots(lambda, r, 50).unwrap();
    let dir = dirichlet_root_sequence(lambda, r, 50);
    for l in 0..50 {
        let lo = lambda * lambda + ((l as f64 + 0.5) * PI / r).powi(2);
        assert!(rob.roots[l] > lo && rob.roots[l] < dir.roots[l], "l={l}");
    }
}

#[test]
fn tail_fit_matches_analytic_coefficients() {
    let (lambda, r) = (0.7, 1.5);
    let seq = robin_mode_roots(lambda, r, 200).unwrap();
    let want = analytic_tail(lambda * r);
    assert!((seq.tail_params.a1 - want.a1).abs() < 1e-8);
    assert!(
        (seq.tail_params.a3 - want.a3).abs() < 1e-3 * want.a3.abs(),
        "{:?} vs {want:?}",
        seq.tail_params
    );
}

#[test]
fn zeta_route_matches_closed_forms() {
    for lambda in [0.25, 1.0, 3.0] {
        for r in [0.3, 1.0, 2.5] {
            let dd = ModeProblem::new(lambda, r, ModeBc::Dirichlet, ModeBc::Dirichlet).unwrap();
            let dr = ModeProblem::new(lambda, r, ModeBc::Dirichlet, ModeBc::RobinAbs).unwrap();
            let zd = mode_logdet_zeta(&dirichlet_root_sequence(lambda, r, 100)).unwrap();
            let zr = mode_logdet_zeta(&robin_mode_roots(lambda, r, 100).unwrap()).unwrap();
            assert!(
                (zd - mode_logdet_gy(&dd)).abs() < 1e-8,
                "D λ={lambda} r={r}"
            );
            assert!(
                (zr - mode_logdet_gy(&dr)).abs() < 1e-8,
                "R λ={lambda} r={r}"
            );
        }
    }
}

#[test]
fn closed_form_special_cases() {
    let free = ModeProblem::new(0.0, 1.5, ModeBc::Dirichlet, ModeBc::Dirichlet).unwrap();
    assert!((mode_logdet_gy(&free) - 3f64.ln()).abs() < 1e-15);
    let neu = ModeProblem::new(0.0, 1.5, ModeBc::Dirichlet, ModeBc::Neumann).unwrap();
    assert!((mode_logdet_gy(&neu) - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn too_few_roots_is_an_error() {
    let short = robin_mode_roots(1.0, 1.0, 5).unwrap();
    assert!(mode_logdet_zeta(&short).is_err());
    assert!(ModeProblem::new(1.0, 0.0, ModeBc::Dirichlet, ModeBc::Dirichlet).is_err());
    assert!(ModeProblem::new(1.0, 1.0, ModeBc::RobinAbs, ModeBc::RobinAbs).is_err());
}

#[test]
fn root_cache_roundtrip_is_exact() {
    let seq = robin_mode_roots(0.9, 1.1, 60).unwrap();
    let text = serde_json::to_string(&seq).unwrap();
    let back: RootSequence = serde_json::from_str(&text).unwrap();
    assert_eq!(back, seq);
    assert_eq!(
        mode_logdet_zeta(&back).unwrap().to_bits(),
        mode_logdet_zeta(&seq).unwrap().to_bits()
    );
}

#[test]
fn shooting_oracle_matches_closed_form_dtn() {
    for (lambda, r) in [(0.5, 1.0), (1.0, 1.0), (2.0, 0.4), (0.0, 2.0)] {
        let exact = mode_poisson_dtn(lambda, r, ModeBc::Dirichlet).unwrap();
        let shot = mode_poisson_dtn_shooting(lambda, r, 2000).unwrap();
        assert!(
            (exact - shot).abs() < 1e-9 * exact.abs().max(1.0),
            "λ={lambda} r={r}"
        );
    }
}

#[test]
fn q_value_reference() {
    // 2λ / (1 − e^{−2λr}) and its λ → 0 limit 1/r
    assert!((mode_q_value(1.0, 1.0).unwrap() - 2.0 / (1.0 - (-2f64).exp())).abs() < 1e-15);
    assert!((mode_q_value(0.0, 4.0).unwrap() - 0.25).abs() < 1e-15);
    assert!((mode_q_value(1e-9, 4.0).unwrap() - 0.25).abs() < 1e-8);
}
