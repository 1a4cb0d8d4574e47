use g2_core::forms::{standard_phi0, DIM};
use g2_core::torsion::{
    default_grid, default_mode, estimate_norm_pattern, perturbed_structure, solve, torsion_residual, Direction,
    IterationTrace, Mode, SolverConfig, SpectralField, SpectralGrid, TorsionError, DEFAULT_ACTIVE,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn modes(spec: &str) -> Vec<Mode> {
    Mode::parse_list(spec, &DEFAULT_ACTIVE).unwrap()
}

fn solved(eps: f64, spec: &str) -> g2_core::torsion::SolveOutcome {
    let phi = perturbed_structure(&default_grid(16), eps, &modes(spec)).unwrap();
    solve(&phi, &cfg()).unwrap()
}

/// Largest ε with a positive structure, located by bisection.
fn positivity_threshold(m: &[Mode]) -> f64 {
    let g = default_grid(16);
    let (mut lo, mut hi) = (0.0, 2.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        match perturbed_structure(&g, mid, m) {
            Ok(_) => lo = mid,
            Err(_) => hi = mid,
        }
    }
    lo
}

#[test]
fn zero_epsilon_is_phi0() {
    let g = default_grid(16);
    let phi = perturbed_structure(&g, 0.0, &[default_mode()]).unwrap();
    assert_eq!(phi, SpectralField::constant(&g, &standard_phi0()));
    let (r, n) = torsion_residual(&phi).unwrap();
    assert_eq!(n.l2, 0.0);
    assert_eq!(r.max_coefficient(), 0.0);
}

#[test]
fn small_mode_has_torsion_and_closed_phi() {
    let g = default_grid(16);
    let phi = perturbed_structure(&g, 0.01, &[default_mode()]).unwrap();
    assert_eq!(phi.d().max_coefficient(), 0.0);
    let (r, n) = torsion_residual(&phi).unwrap();
    assert!(n.l2 > 1e-6);
    let zero = [0i64; DIM];
    for c in 0..r.components().len() {
        assert_eq!(r.coefficient(c, &zero), Complex64::new(0.0, 0.0));
    }
}

#[test]
fn large_mode_is_rejected() {
    let g = default_grid(16);
    assert!(matches!(perturbed_structure(&g, 0.5, &[default_mode()]), Err(TorsionError::PerturbationTooLarge { .. })));
    let t = positivity_threshold(&[default_mode()]);
    assert!(t > 0.01 && t < 0.5, "threshold {t}");
}

#[test]
fn residual_is_resolution_independent() {
    let norm = |n: usize| {
        let phi = perturbed_structure(&default_grid(n), 0.01, &[default_mode()]).unwrap();
        torsion_residual(&phi).unwrap().1.l2
    };
    let (a, b) = (norm(16), norm(32));
    assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
}

#[test]
fn solver_converges_and_keeps_class() {
    let g = default_grid(16);
    let phi = perturbed_structure(&g, 0.01, &[default_mode()]).unwrap();
    let out = solve(&phi, &cfg()).unwrap();
    assert!(out.converged);
    assert!(out.final_residual <= 1e-8);
    assert!(out.trace.monotone_after_first());
    assert_eq!(out.phi.d().max_coefficient(), 0.0);
    assert_eq!(out.phi.mean(), phi.mean());
    assert_eq!(out.eta.mean().max_abs(), 0.0);
    assert!(out.eta.codifferential().max_coefficient() < 1e-15);
    let p = estimate_norm_pattern(&out.trace);
    assert!(p.bounded && p.residual_monotone);
    assert_eq!(p.iterations, out.iterations());
}

#[test]
fn flat_input_needs_no_iterations() {
    let g = default_grid(16);
    let out = solve(&SpectralField::constant(&g, &standard_phi0()), &cfg()).unwrap();
    assert!(out.converged);
    assert_eq!(out.iterations(), 0);
    assert_eq!(out.eta.max_coefficient(), 0.0);
}

#[test]
fn empty_trace_pattern_is_trivial() {
    let p = estimate_norm_pattern(&IterationTrace::default());
    assert_eq!(p.iterations, 0);
    assert!(p.bounded && p.residual_monotone);
}

#[test]
fn single_vector_modes_are_torsion_free() {
    let g = default_grid(16);
    let phi = perturbed_structure(&g, 0.05, &modes("1,2,0:v5")).unwrap();
    assert!(torsion_residual(&phi).unwrap().1.l2 < 1e-12);
}

#[test]
fn generic_mode_correction_is_linear_in_epsilon() {
    let a = solved(0.01, "2,1,1:45").d_eta().l2;
    let b = solved(0.005, "2,1,1:45").d_eta().l2;
    assert!((a / b - 2.0).abs() < 0.1, "ratio {}", a / b);
}

#[test]
fn lie_derivative_pair_correction_is_quadratic() {
    let spec = "1,0,0:v4;0,1,0:v7";
    let a = solved(0.01, spec).d_eta().l2;
    let b = solved(0.005, spec).d_eta().l2;
    assert!((3.0..=5.0).contains(&(a / b)), "ratio {}", a / b);
}

#[test]
fn stress_boundary_is_an_outcome_not_a_crash() {
    let m = [default_mode()];
    let eps = 0.999 * positivity_threshold(&m);
    let phi = perturbed_structure(&default_grid(16), eps, &m).unwrap();
    match solve(&phi, &SolverConfig { max_iterations: 20, ..cfg() }) {
        Ok(out) => assert!(out.final_residual.is_finite()),
        Err(TorsionError::Diverged { trace }) => assert!(!trace.rows.is_empty()),
        Err(TorsionError::PositivityLost { iteration, .. }) => assert!(iteration >= 1),
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn config_validation() {
    assert!(SolverConfig { resolution: 12, ..cfg() }.validate().is_err());
    assert!(SolverConfig { damping: 0.0, ..cfg() }.validate().is_err());
    assert!(SolverConfig { tolerance: -1.0, ..cfg() }.validate().is_err());
    assert!(cfg().validate().is_ok());
}

#[test]
fn mode_parsing() {
    let m = Mode::parse("2,1,1:45", &DEFAULT_ACTIVE).unwrap();
    assert_eq!(m, default_mode());
    assert_eq!(Mode::parse("1,0,0:v4", &DEFAULT_ACTIVE).unwrap().direction, Direction::Vector(3));
    assert!(Mode::parse("1,0:45", &DEFAULT_ACTIVE).is_err());
    assert!(Mode::parse("1,0,0:44", &DEFAULT_ACTIVE).is_err());
    assert!(Mode::parse("1,0,0", &DEFAULT_ACTIVE).is_err());
    assert_eq!(modes("1,0,0:v4;0,1,0:v7").len(), 2);
}

fn two_form_mode() -> impl Strategy<Value = Mode> {
    (proptest::array::uniform3(-3i64..=3), 0usize..DIM, 0usize..DIM)
        .prop_filter("nonzero frequency, distinct axes", |(k, a, b)| k.iter().any(|&x| x != 0) && a != b)
        .prop_map(|(k, a, b)| {
            let mut frequency = [0; DIM];
            for (i, &axis) in DEFAULT_ACTIVE.iter().enumerate() {
                frequency[axis] = k[i];
            }
            Mode { frequency, direction: Direction::TwoForm(a.min(b), a.max(b)) }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbation_is_closed_with_phi0_mean(m in two_form_mode(), eps in 0.0f64..0.02) {
        let phi = perturbed_structure(&default_grid(8), eps, &[m]).unwrap();
        prop_assert_eq!(phi.d().max_coefficient(), 0.0);
        prop_assert_eq!(phi.mean(), standard_phi0());
    }

    #[test]
    fn grid_round_trip(m in two_form_mode(), eps in 0.001f64..0.05) {
        let phi = perturbed_structure(&default_grid(8), eps, &[m]).unwrap();
        let back = SpectralField::from_grid(phi.grid(), 3, &phi.to_grid());
        prop_assert!(back.sub(&phi).max_coefficient() < 1e-12);
    }

    #[test]
    fn codifferential_of_coexact_part_vanishes(m in two_form_mode(), eps in 0.001f64..0.02) {
        let g = SpectralGrid::new(DEFAULT_ACTIVE.to_vec(), 8);
        let phi = perturbed_structure(&g, eps, &[m]).unwrap();
        let (r, _) = torsion_residual(&phi).unwrap();
        let c = r.hodge().coexact_part();
        prop_assert!(c.codifferential().max_coefficient() < 1e-14);
    }
}
