use g2_core::forms::{
    euclidean_volume, exterior_derivative, form_from_json, form_to_json, hodge_star, is_positive, mask_axes,
    metric_from_three_form, standard_phi0, FormField, Grid, KForm, MetricTensor, DIM,
};
use g2_core::linalg;
use g2_core::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn basis<T: g2_core::Scalar>(i: usize) -> Vec<T> {
    (0..DIM).map(|j| if i == j { T::one() } else { T::zero() }).collect()
}

fn phi0_q() -> KForm<Rational> {
    standard_phi0()
}

#[test]
fn phi0_on_basis_triples() {
    let phi = phi0_q();
    let ev = |a: usize, b: usize, c: usize| phi.evaluate(&[basis(a - 1), basis(b - 1), basis(c - 1)]).unwrap();
    assert_eq!(ev(1, 2, 3), q(1));
    assert_eq!(ev(2, 5, 7), q(-1));
    assert_eq!(ev(1, 2, 4), q(0));
}

#[test]
fn phi0_monomials_and_signs() {
    let expected = [("123", 1), ("145", 1), ("167", 1), ("246", 1), ("257", -1), ("347", -1), ("356", -1)];
    let phi = phi0_q();
    assert_eq!(phi, KForm::from_terms(3, &expected).unwrap());
    assert_eq!(phi.support_len(), 7);
}

#[test]
fn phi_wedge_star_phi_is_seven_volumes() {
    let phi = phi0_q();
    let g = MetricTensor::euclidean();
    let top = phi.wedge(&hodge_star(&g, &phi)).unwrap();
    assert_eq!(top, euclidean_volume::<Rational>().scale(&q(7)));
}

#[test]
fn scaled_phi0_metric() {
    let g = metric_from_three_form(&phi0_q().scale(&q(8))).unwrap();
    let four: Vec<Vec<Rational>> = linalg::identity::<Rational>(DIM).iter().map(|r| r.iter().map(|x| x * q(4)).collect()).collect();
    assert_eq!(g.entries, four);
    let g = metric_from_three_form(&standard_phi0::<f64>().scale(&2.0)).unwrap();
    let c = 2f64.powf(2.0 / 3.0);
    for i in 0..DIM {
        for j in 0..DIM {
            let want = if i == j { c } else { 0.0 };
            assert!((g.entries[i][j] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn positivity_examples() {
    assert!(!is_positive(&KForm::<Rational>::monomial(&[0, 1, 2], q(1)).unwrap()));
    let bumped = standard_phi0::<f64>().add(&KForm::monomial(&[0, 1, 3], 0.01).unwrap()).unwrap();
    assert!(is_positive(&bumped));
    assert!(is_positive(&phi0_q()));
    assert!(!is_positive(&KForm::<f64>::zero(3)));
}

#[test]
fn star_of_one_and_dx1() {
    let g = MetricTensor::<Rational>::euclidean();
    assert_eq!(hodge_star(&g, &KForm::scalar(q(1))), euclidean_volume());
    assert_eq!(hodge_star(&g, &KForm::dx(0)), KForm::monomial(&[1, 2, 3, 4, 5, 6], q(1)).unwrap());
}

#[test]
fn double_star_is_identity_in_every_degree() {
    let g = MetricTensor::<Rational>::euclidean();
    for k in 0..=DIM {
        let n = g2_core::forms::binomial7(k);
        let coeffs = (0..n).map(|i| q(i as i64 * 3 - 5)).collect();
        let a = KForm::from_coeffs(k, coeffs).unwrap();
        assert_eq!(hodge_star(&g, &hodge_star(&g, &a)), a, "degree {k}");
    }
}

#[test]
fn pullback_by_minus_identity_negates() {
    let m: Vec<Vec<Rational>> = linalg::identity::<Rational>(DIM).iter().map(|r| r.iter().map(|x| -x.clone()).collect()).collect();
    assert_eq!(phi0_q().pullback(&m), phi0_q().neg());
}

#[test]
fn exterior_derivative_of_sine_one_form() {
    let tau = std::f64::consts::TAU;
    let mut errs = Vec::new();
    for n in [16, 32] {
        let grid = Grid::new([n, n, 1, 1, 1, 1, 1], [1.0; DIM]).unwrap();
        let f = FormField::sample(grid.clone(), |x| KForm::dx(0).scale(&(tau * x[1]).sin())).unwrap();
        let df = exterior_derivative(&f).unwrap();
        let exact = FormField::sample(grid, |x| KForm::monomial(&[0, 1], -tau * (tau * x[1]).cos()).unwrap()).unwrap();
        errs.push(df.sub(&exact).unwrap().max_abs());
        let ddf = exterior_derivative(&df).unwrap();
        assert!(ddf.max_abs() < 1e-9);
    }
    let order = (errs[0] / errs[1]).log2();
    assert!((order - 2.0).abs() < 0.2, "order {order}");
}

#[test]
fn constant_phi0_field_is_closed_and_coclosed() {
    let grid = Grid::new([4; DIM], [1.0; DIM]).unwrap();
    let phi = standard_phi0::<f64>();
    let star = hodge_star(&MetricTensor::euclidean(), &phi);
    assert_eq!(exterior_derivative(&FormField::constant(grid.clone(), &phi)).unwrap().max_abs(), 0.0);
    assert_eq!(exterior_derivative(&FormField::constant(grid, &star)).unwrap().max_abs(), 0.0);
}

#[test]
fn json_uses_one_based_labels() {
    let v = form_to_json(&phi0_q());
    assert_eq!(v["degree"], 3);
    assert_eq!(v["coeffs"]["2,5,7"], "-1");
    let back: KForm<Rational> = form_from_json(&v).unwrap();
    assert_eq!(back, phi0_q());
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(-2i64..=2, DIM), DIM)
}

fn real_form(degree: usize) -> impl Strategy<Value = KForm<f64>> {
    proptest::collection::vec(-3.0f64..3.0, g2_core::forms::binomial7(degree))
        .prop_map(move |c| KForm::from_coeffs(degree, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn metric_is_natural_under_pullback(m in small_matrix(), diag in proptest::collection::vec(1i64..4, DIM)) {
        let a: Vec<Vec<f64>> = (0..DIM)
            .map(|i| (0..DIM).map(|j| if i == j { diag[i] as f64 } else { m[i][j] as f64 / 8.0 }).collect())
            .collect();
        let det = linalg::det(&a);
        prop_assume!(det.abs() > 1e-3);
        let phi = standard_phi0::<f64>().pullback(&a);
        let g = metric_from_three_form(&phi).unwrap();
        let want = linalg::matmul(&linalg::transpose(&a), &a);
        for i in 0..DIM {
            for j in 0..DIM {
                prop_assert!((g.entries[i][j] - want[i][j]).abs() < 1e-9 * (1.0 + want[i][j].abs()));
            }
        }
        prop_assert!((g.volume - det.abs()).abs() < 1e-9 * det.abs());
        prop_assert_eq!(g.orientation, if det > 0.0 { 1 } else { -1 });
    }

    #[test]
    fn exact_pullback_by_rational_matrix(m in small_matrix()) {
        let a: Vec<Vec<Rational>> = (0..DIM)
            .map(|i| (0..DIM).map(|j| if i == j { q(1) } else if j > i { q(m[i][j]) } else { Rational::zero() }).collect())
            .collect();
        let phi = phi0_q().pullback(&a);
        let g = metric_from_three_form(&phi).unwrap();
        prop_assert_eq!(g.entries, linalg::matmul(&linalg::transpose(&a), &a));
        prop_assert!(g.volume.is_one());
    }

    #[test]
    fn euclidean_star_preserves_norm(k in 0usize..=DIM, seed in any::<u64>()) {
        let n = g2_core::forms::binomial7(k);
        let coeffs: Vec<f64> = (0..n).map(|i| (((seed >> (i % 60)) & 15) as f64) - 7.5).collect();
        let a = KForm::from_coeffs(k, coeffs).unwrap();
        let s = hodge_star(&MetricTensor::euclidean(), &a);
        prop_assert!((s.coeff_norm() - a.coeff_norm()).abs() < 1e-12);
    }

    #[test]
    fn wedge_is_graded_commutative(a in real_form(2), b in real_form(3)) {
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        prop_assert!(ab.approx_eq(&ba, 1e-12));
        let aa = b.wedge(&b).unwrap();
        prop_assert!(aa.max_abs() < 1e-12);
    }

    #[test]
    fn evaluation_is_alternating(axes in proptest::sample::subsequence((0..DIM).collect::<Vec<_>>(), 3)) {
        let phi = phi0_q();
        let v: Vec<Vec<Rational>> = axes.iter().map(|&i| basis(i)).collect();
        let swapped = vec![v[1].clone(), v[0].clone(), v[2].clone()];
        prop_assert_eq!(phi.evaluate(&v).unwrap(), -phi.evaluate(&swapped).unwrap());
        prop_assert_eq!(phi.evaluate(&v).unwrap(), phi.coeff(&axes));
    }
}

#[test]
fn mask_axes_are_sorted() {
    assert_eq!(mask_axes(0b101), vec![0, 2]);
}
