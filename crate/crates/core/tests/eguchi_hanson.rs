use g2_core::eguchi_hanson::{
    ale_decay_fit, complex_hessian, curvature_proxy, default_radii, eh_report, expected_product_metric,
    hyperkahler_triple, kahler_potential, metric_sample, potential_derivatives, product_g2_form, random_point,
    ricci_check, scaling_check, stencil_error, ChartPoint, EhError,
};
use g2_core::forms::{is_positive, metric_from_three_form, standard_phi0};
use g2_core::linalg;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point() -> impl Strategy<Value = ChartPoint> {
    proptest::array::uniform4(-3.0f64..3.0)
        .prop_filter("away from origin", |c| c.iter().map(|x| x * x).sum::<f64>() > 0.04)
        .prop_map(ChartPoint::from_coords)
}

#[test]
fn potential_examples() {
    assert_eq!(kahler_potential(0.0, 2.5).unwrap(), 6.25);
    let v = kahler_potential(1.0, 1.0).unwrap();
    assert!((v - 0.532_839_9).abs() < 1e-7);
    assert!((kahler_potential(1.0, 100.0).unwrap() - 1e4).abs() < 10.0);
    assert!(matches!(kahler_potential(-1.0, 1.0), Err(EhError::BadParameter(_))));
}

#[test]
fn closed_form_first_derivative() {
    for (s, rho) in [(1.0f64, 0.3f64), (2.0, 5.0), (0.5, 40.0)] {
        let (d1, _) = potential_derivatives(s, rho);
        let direct = (rho * rho + s.powi(4)).sqrt() / rho;
        assert!((1.0 + d1 - direct).abs() < 1e-13 * direct);
    }
}

#[test]
fn metric_samples() {
    let id = metric_sample(0.0, &ChartPoint::real(0.3, 1.0, -2.0, 0.1)).unwrap();
    assert_eq!(id.h, [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]]);
    let p = ChartPoint::real(1.0, 0.0, 0.0, 0.0);
    let h = metric_sample(1.0, &p).unwrap();
    assert!((h.det() - 1.0).abs() < 1e-12);
    let (d1, d2) = potential_derivatives(1.0, 1.0);
    assert!((h.h[0][0].re - (1.0 + d1 + d2)).abs() < 1e-13);
    assert!((h.h[1][1].re - (1.0 + d1)).abs() < 1e-13);
    assert_eq!(h.h[0][1].norm(), 0.0);
}

#[test]
fn hessian_of_potential_reproduces_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in [0.5, 1.0, 2.0] {
        for _ in 0..10 {
            let p = random_point(&mut rng, 3.0);
            let numeric = complex_hessian(|q| kahler_potential(s, q.r()).unwrap(), &p, 1e-3);
            let h = metric_sample(s, &p).unwrap().h;
            for i in 0..2 {
                for j in 0..2 {
                    assert!((numeric[i][j] - h[i][j]).norm() < 1e-4, "s={s} p={p:?}");
                }
            }
        }
    }
}

#[test]
fn ricci_examples() {
    let p = ChartPoint::real(1.0, 0.0, 1.0, 0.0);
    assert!(ricci_check(1.0, &p, 1e-3).unwrap() < 1e-6);
    assert_eq!(ricci_check(0.0, &p, 1e-3).unwrap(), 0.0);
}

#[test]
fn stencil_converges_at_second_order() {
    let p = ChartPoint::real(0.7, 0.2, -0.4, 0.9);
    let e1 = stencil_error(1.0, &p, 1e-2).unwrap();
    let e2 = stencil_error(1.0, &p, 5e-3).unwrap();
    let ratio = e1 / e2;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn ale_fits() {
    let radii = [10.0, 30.0, 100.0, 300.0, 1000.0];
    let k0 = ale_decay_fit(1.0, &radii, 0).unwrap();
    assert!((-4.3..=-3.7).contains(&k0.exponent), "{}", k0.exponent);
    let k1 = ale_decay_fit(1.0, &radii, 1).unwrap();
    assert!((-5.3..=-4.7).contains(&k1.exponent), "{}", k1.exponent);
    assert!(matches!(ale_decay_fit(0.0, &radii, 0), Err(EhError::Degenerate)));
    assert_eq!(default_radii(2.0), vec![20.0, 60.0, 200.0, 600.0, 2000.0]);
}

#[test]
fn scaling_examples() {
    let p = ChartPoint::real(1.0, 0.0, 1.0, 0.0);
    let same = scaling_check(1.0, 1.0, &p).unwrap();
    assert_eq!(same.residual_lambda_s, 0.0);
    assert_eq!(same.residual_s_over_lambda, 0.0);
    let r = scaling_check(1.0, 2.0, &p).unwrap();
    let lo = r.residual_lambda_s.min(r.residual_s_over_lambda);
    let hi = r.residual_lambda_s.max(r.residual_s_over_lambda);
    assert!(lo < 1e-10 && hi > 1e-3);
    assert_eq!(r.winner(1e-10), Some("s/lambda"));
}

#[test]
fn dilation_round_trip() {
    let p = ChartPoint::real(0.4, -1.1, 0.8, 0.3);
    let back = p.scaled(2.5).scaled(1.0 / 2.5);
    let a = metric_sample(1.0, &p).unwrap().h;
    let b = metric_sample(1.0, &back).unwrap().h;
    for i in 0..2 {
        for j in 0..2 {
            assert!((a[i][j] - b[i][j]).norm() < 1e-10);
        }
    }
}

#[test]
fn flat_product_is_phi0_after_linear_change() {
    let phi = product_g2_form(0.0, &ChartPoint::real(1.0, 2.0, 3.0, 4.0), 1.0).unwrap();
    let g = metric_from_three_form(&phi).unwrap();
    assert!(g.approx_eq(&metric_from_three_form(&standard_phi0::<f64>()).unwrap(), 1e-12));
}

#[test]
fn curvature_proxy_scales_inverse_square() {
    let a = curvature_proxy(1.0).unwrap();
    let b = curvature_proxy(2.0).unwrap();
    assert!((a / b - 4.0).abs() < 0.05, "{}", a / b);
    assert_eq!(curvature_proxy(0.0).unwrap(), 0.0);
}

#[test]
fn report_is_consistent() {
    let r = eh_report(1.0, 50, 3).unwrap();
    assert!(r.det_h_max_dev < 1e-10);
    assert!(r.ricci_max < 1e-6);
    assert!((r.stencil_order - 2.0).abs() < 0.2);
    assert_eq!(r.scaling_winner.as_deref(), Some("s/lambda"));
    assert!(r.product_positive);
    assert_eq!(r, eh_report(1.0, 50, 3).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monge_ampere_holds(s in 0.05f64..4.0, p in point()) {
        prop_assert!((metric_sample(s, &p).unwrap().det() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn metric_is_even(s in 0.1f64..3.0, p in point()) {
        let a = metric_sample(s, &p).unwrap().h;
        let b = metric_sample(s, &p.scaled(-1.0)).unwrap().h;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn hyperkahler_relations(s in 0.1f64..3.0, p in point()) {
        let t = hyperkahler_triple(s, &p).unwrap();
        let [i2, j2, k2] = t.squares();
        prop_assert!((j2 - k2).abs() < 1e-12 * j2.abs());
        prop_assert!((i2 / j2 - 1.0).abs() < 1e-8);
        prop_assert!(t.max_cross() < 1e-10);
    }

    #[test]
    fn product_form_is_positive_with_block_metric(s in 0.1f64..3.0, p in point(), a in prop::sample::select(vec![0.5f64, 2.0])) {
        let phi = product_g2_form(s, &p, a).unwrap();
        prop_assert!(is_positive(&phi));
        let g = metric_from_three_form(&phi).unwrap();
        let want = expected_product_metric(s, &p, a).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                prop_assert!((g.entries[i][j] - want[i][j]).abs() < 1e-9 * (1.0 + want[i][j].abs()));
            }
        }
        let h4: Vec<Vec<f64>> = (3..7).map(|i| (3..7).map(|j| want[i][j]).collect()).collect();
        let vol = a.powi(3) * linalg::det(&h4).sqrt();
        prop_assert!((g.volume - vol).abs() < 1e-9 * vol);
    }

    #[test]
    fn one_scaling_candidate_always_wins(s in 0.2f64..3.0, lambda in 1.2f64..3.0, p in point()) {
        let r = scaling_check(s, lambda, &p).unwrap();
        prop_assert_eq!(r.winner(1e-10), Some("s/lambda"));
    }
}
