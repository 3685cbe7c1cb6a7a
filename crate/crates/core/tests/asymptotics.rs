//! Ray determinants and fitted constant terms.

use num_complex::Complex64;
use zetadet::asymptotics::{
    angle_set, basis_for_growth, fit_constant_term, fit_ray, log_grid, logdet_q_alpha, logdet_q_z,
    q_alpha_mode, standard_basis, sum_ck_check, Ray,
};
use zetadet::gluing::q_logdet;
use zetadet::{EigenLine, Error, TangentialModel};

fn half_integer() -> TangentialModel {
    TangentialModel::arithmetic(0.5, 1.0, vec![1.0], 0).unwrap()
}

#[test]
fn mode_eigenvalue_reference() {
    let v = q_alpha_mode(1.0, 1.0, Complex64::new(3.0, 0.0)).unwrap();
    assert!((v.re - (3.0 + 4.0 / (4f64.exp() - 1.0))).abs() < 1e-14);
    assert_eq!(v.im, 0.0);
    assert!(q_alpha_mode(1.0, 1.0, Complex64::new(-5.0, 0.0)).is_err());
}

#[test]
fn zero_shift_recovers_q() {
    for m in [
        half_integer(),
        TangentialModel::explicit(
            vec![EigenLine {
                lambda: 1.0,
                multiplicity: 1,
            }],
            0,
        )
        .unwrap(),
    ] {
        for r in [0.5, 2.0] {
            let q = q_logdet(&m, r).unwrap().value;
            let z = logdet_q_z(&m, r, Complex64::new(1e-9, 0.0)).unwrap().value;
            assert!(
                (z.re - q).abs() < 1e-7 && z.im.abs() < 1e-12,
                "r={r}: {z} vs {q}"
            );
        }
    }
}

#[test]
fn conjugate_rays_give_conjugate_values() {
    let m = half_integer();
    for ray in angle_set(4).unwrap() {
        let a = logdet_q_alpha(&m, 2.0, &ray, 50.0).unwrap().value;
        let b = logdet_q_alpha(&m, 2.0, &ray.conj(), 50.0).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-10 * a.norm().max(1.0));
    }
}

#[test]
fn angle_sets_are_symmetric() {
    for m in 2..=9 {
        let rays = angle_set(m).unwrap();
        assert_eq!(rays.len(), m);
        assert_eq!(rays.iter().map(|r| r.theta_num).sum::<i64>(), 0);
        assert!(rays.iter().all(|r| r.theta_num.abs() < m as i64));
    }
    assert!(Ray::new(1, 0).is_err());
    assert!(Ray::new(3, 3).is_err());
}

#[test]
fn synthetic_fit_recovers_coefficients() {
    let grid = log_grid(10.0, 1e4, 12).unwrap();
    let c = [
        Complex64::new(1.5, -0.2),
        Complex64::new(-0.3, 0.1),
        Complex64::new(0.25, 0.7),
    ];
    let samples: Vec<(f64, Complex64)> = grid
        .iter()
        .map(|&t| {
            (
                t,
                c[0] * t.sqrt() + c[1] * t.ln() + c[2] + Complex64::new(2.0, 0.0) / t,
            )
        })
        .collect();
    let fit = fit_constant_term(&samples, &standard_basis(), 0.0, 0.0).unwrap();
    assert!((fit.pi0 - c[2]).norm() < 1e-9);
    assert!((fit.coefficient("log t").unwrap() - c[1]).norm() < 1e-10);
    assert!(fit.residual_norm < 1e-9);
}

#[test]
fn fit_preconditions() {
    let few: Vec<(f64, Complex64)> = (1..5)
        .map(|i| (i as f64, Complex64::new(1.0, 0.0)))
        .collect();
    assert!(matches!(
        fit_constant_term(&few, &standard_basis(), 0.0, 0.0),
        Err(Error::InvalidFit(_))
    ));
    let narrow: Vec<(f64, Complex64)> = log_grid(10.0, 100.0, 9)
        .unwrap()
        .into_iter()
        .map(|t| (t, Complex64::new(1.0, 0.0)))
        .collect();
    assert!(fit_constant_term(&narrow, &standard_basis(), 0.0, 0.0).is_err());
    assert_eq!(basis_for_growth(1.0), standard_basis());
    assert!(basis_for_growth(3.0).len() > standard_basis().len());
}

#[test]
fn constant_terms_follow_angle_law() {
    let grid = log_grid(100.0, 1e4, 9).unwrap();
    let m = TangentialModel::arithmetic(1.0, 1.0, vec![1.0, 1.0], 0).unwrap();
    let d = m.d_coefficient().unwrap();
    for ray in angle_set(3).unwrap() {
        let fit = fit_ray(&m, 2.0, &ray, &grid).unwrap();
        assert!(
            (fit.pi0 - fit.predicted).norm() < 1e-3,
            "θ={}: {} vs {}",
            ray.theta(),
            fit.pi0,
            fit.predicted
        );
        assert_eq!(fit.predicted, Complex64::new(0.0, 0.5 * ray.theta() * d));
    }
    let s = sum_ck_check(&half_integer(), 4, 2.0, &grid).unwrap();
    assert_eq!(s.theta_num_sum, 0);
    assert!(s.sum_pi0.norm() < 2e-3);
}
