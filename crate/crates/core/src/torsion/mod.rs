//! Closed `G2`-structures with small torsion on flat `T^7` and a
//! preconditioned fixed-point iteration `φ̃ = φ + dη` towards `d Θ(φ̃) = 0`,
//! where `Θ(φ) = *_φ φ`.
//!
//! Fields are pseudo-spectral: the nonlinear `Θ` is evaluated pointwise on
//! a grid, everything else acts on Fourier coefficients. The correction `η`
//! is kept coexact and free of constants, so `dφ̃ = 0` and the periods of
//! `φ` are untouched by construction.

mod spectral;

pub use spectral::{SpectralField, SpectralGrid};

use num_complex::Complex64;
use serde::Serialize;

use crate::forms::{hodge_star, is_positive, metric_from_three_form, standard_phi0, FormError, KForm, DIM};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TorsionError {
    #[error("perturbation too large: positivity fails at grid node {node}")]
    PerturbationTooLarge { node: usize },
    #[error("positivity lost at iteration {iteration}, grid node {node}")]
    PositivityLost { iteration: usize, node: usize, trace: IterationTrace },
    #[error("iteration diverged after {} steps", trace.rows.len())]
    Diverged { trace: IterationTrace },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("invalid mode: {0}")]
    Mode(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Constant direction multiplying `sin(k·x)` in the 2-form `β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `dx^a ∧ dx^b` (0-based, `a < b`).
    TwoForm(usize, usize),
    /// `∂_a ⌟ φ0`, so that `dβ` is a Lie derivative of `φ0`.
    Vector(usize),
}

/// One Fourier mode `ε sin(k·x) σ` of the potential `β`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mode {
    pub frequency: [i64; DIM],
    pub direction: Direction,
}

impl Mode {
    /// Parses `"k1,k2,...:ab"` (2-form `dx^{ab}`) or `"k1,k2,...:va"` (vector
    /// `∂_a`): frequencies along the active axes, 1-based axis labels.
    pub fn parse(spec: &str, active: &[usize]) -> Result<Self, TorsionError> {
        let (freq, dir) = spec.split_once(':').ok_or_else(|| TorsionError::Mode(format!("{spec:?} lacks ':direction'")))?;
        let ks: Vec<i64> = freq
            .split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|_| TorsionError::Mode(format!("bad frequency {s:?}"))))
            .collect::<Result<_, _>>()?;
        if ks.len() != active.len() {
            return Err(TorsionError::Mode(format!("expected {} frequencies, got {}", active.len(), ks.len())));
        }
        let axis = |c: char| -> Result<usize, TorsionError> {
            match c.to_digit(10) {
                Some(d @ 1..=7) => Ok(d as usize - 1),
                _ => Err(TorsionError::Mode(format!("bad axis {c:?} in {spec:?}"))),
            }
        };
        let dir = dir.trim();
        let direction = if let Some(v) = dir.strip_prefix('v') {
            let mut cs = v.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Direction::Vector(axis(c)?),
                _ => return Err(TorsionError::Mode(format!("bad vector direction {dir:?}"))),
            }
        } else {
            let cs: Vec<char> = dir.chars().collect();
            if cs.len() != 2 {
                return Err(TorsionError::Mode(format!("bad 2-form direction {dir:?}")));
            }
            let (a, b) = (axis(cs[0])?, axis(cs[1])?);
            if a >= b {
                return Err(TorsionError::Mode(format!("2-form axes must increase in {dir:?}")));
            }
            Direction::TwoForm(a, b)
        };
        let mut frequency = [0; DIM];
        for (&a, &k) in active.iter().zip(&ks) {
            frequency[a] = k;
        }
        if frequency.iter().all(|&k| k == 0) {
            return Err(TorsionError::Mode("zero frequency".into()));
        }
        Ok(Mode { frequency, direction })
    }

    pub fn parse_list(spec: &str, active: &[usize]) -> Result<Vec<Self>, TorsionError> {
        spec.split(';').filter(|s| !s.trim().is_empty()).map(|s| Mode::parse(s, active)).collect()
    }

    fn sigma(&self) -> KForm<f64> {
        match self.direction {
            Direction::TwoForm(a, b) => KForm::monomial(&[a, b], 1.0).expect("increasing axes"),
            Direction::Vector(a) => {
                let mut v = vec![0.0; DIM];
                v[a] = 1.0;
                standard_phi0::<f64>().interior(&v)
            }
        }
    }
}

/// Default single mode: `sin(2x1 + x2 + x3) dx^{45}` (1-based axes).
pub fn default_mode() -> Mode {
    let mut frequency = [0; DIM];
    frequency[0] = 2;
    frequency[1] = 1;
    frequency[2] = 1;
    Mode { frequency, direction: Direction::TwoForm(3, 4) }
}

pub const DEFAULT_ACTIVE: [usize; 3] = [0, 1, 2];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub resolution: usize,
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tolerance: 1e-8, max_iterations: 60, resolution: 16, damping: 1.0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), TorsionError> {
        if !(self.tolerance > 0.0) {
            return Err(TorsionError::Config("tolerance must be positive".into()));
        }
        if self.resolution < 8 || !self.resolution.is_power_of_two() {
            return Err(TorsionError::Config("resolution must be a power of two, at least 8".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(TorsionError::Config("damping must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// `φ = φ0 + dβ`, `β = ε Σ sin(k·x) σ`; closed by construction.
pub fn perturbed_structure(grid: &SpectralGrid, epsilon: f64, modes: &[Mode]) -> Result<SpectralField, TorsionError> {
    let phi0 = standard_phi0::<f64>();
    let mut beta = SpectralField::zero(grid, 2);
    for m in modes {
        let b = m.sigma();
        let neg = m.frequency.map(|k| -k);
        // sin(k·x) = (e^{ikx} − e^{−ikx}) / 2i
        let c = Complex64::new(0.0, -epsilon / 2.0);
        for (i, &bi) in b.coeffs().iter().enumerate() {
            if bi != 0.0 {
                beta.add_coefficient(i, &m.frequency, c * bi);
                beta.add_coefficient(i, &neg, -c * bi);
            }
        }
    }
    let phi = SpectralField::constant(grid, &phi0).add(&beta.d());
    if let Some(node) = phi.node_forms().iter().position(|f| !is_positive(f)) {
        return Err(TorsionError::PerturbationTooLarge { node });
    }
    Ok(phi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Norms {
    pub l2: f64,
    pub max: f64,
    pub gradient: f64,
}

impl Norms {
    pub fn of(f: &SpectralField) -> Self {
        Norms { l2: f.rms(), max: f.max_abs(), gradient: f.gradient_rms() }
    }
}

/// `Θ(φ) = *_φ φ` on the grid, transformed back and band-truncated.
pub fn theta(phi: &SpectralField) -> Result<SpectralField, usize> {
    let forms = phi.node_forms();
    let values = crate::util::par_map_range(forms.len(), |n| {
        let f = &forms[n];
        metric_from_three_form(f).ok().filter(|_| is_positive(f)).map(|g| hodge_star(&g, f))
    });
    let mut comps = vec![vec![0.0; forms.len()]; crate::forms::binomial7(4)];
    for (n, v) in values.into_iter().enumerate() {
        let psi = v.ok_or(n)?;
        for (c, x) in comps.iter_mut().zip(psi.coeffs()) {
            c[n] = *x;
        }
    }
    let mut out = SpectralField::from_grid(phi.grid(), 4, &comps);
    out.truncate();
    Ok(out)
}

/// The torsion 5-form `d Θ(φ)` and its norms.
pub fn torsion_residual(phi: &SpectralField) -> Result<(SpectralField, Norms), TorsionError> {
    let psi = theta(phi).map_err(|node| TorsionError::PerturbationTooLarge { node })?;
    let r = psi.d();
    let n = Norms::of(&r);
    Ok((r, n))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub residual: f64,
    pub d_eta_l2: f64,
    pub d_eta_max: f64,
    pub d_eta_gradient: f64,
    pub damping: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
}

impl IterationTrace {
    pub fn residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual).collect()
    }

    /// Residual strictly decreasing from the second row on.
    pub fn monotone_after_first(&self) -> bool {
        self.rows.windows(2).skip(1).all(|w| w[1].residual < w[0].residual)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub eta: SpectralField,
    pub phi: SpectralField,
    pub trace: IterationTrace,
    pub converged: bool,
    pub final_residual: f64,
}

impl SolveOutcome {
    pub fn iterations(&self) -> usize {
        self.trace.rows.len().saturating_sub(1)
    }

    pub fn d_eta(&self) -> Norms {
        Norms::of(&self.eta.d())
    }
}

/// Scale of the flat preconditioner `Δ⁻¹` applied to `*r`.
const PRECONDITIONER: f64 = 1.0;
const MAX_HALVINGS: usize = 3;
const MAX_INCREASES: usize = 5;

/// Iterates `η ← η − τ c Δ⁻¹ P(*dΘ(φ + dη))`, `P` the coexact projection.
pub fn solve(phi: &SpectralField, cfg: &SolverConfig) -> Result<SolveOutcome, TorsionError> {
    solve_scaled(phi, cfg, PRECONDITIONER)
}

pub(crate) fn solve_scaled(phi: &SpectralField, cfg: &SolverConfig, scale: f64) -> Result<SolveOutcome, TorsionError> {
    cfg.validate()?;
    let mut eta = SpectralField::zero(phi.grid(), 2);
    let mut trace = IterationTrace::default();
    let mut damping = cfg.damping;
    let mut halvings = 0;
    let mut increases = 0;
    let mut prev = f64::INFINITY;
    for iteration in 0..=cfg.max_iterations {
        let d_eta = eta.d();
        let current = phi.add(&d_eta);
        let psi = theta(&current).map_err(|node| TorsionError::PositivityLost { iteration, node, trace: trace.clone() })?;
        let r = psi.d();
        let residual = r.rms();
        let n = Norms::of(&d_eta);
        trace.rows.push(TraceRow {
            iteration,
            residual,
            d_eta_l2: n.l2,
            d_eta_max: n.max,
            d_eta_gradient: n.gradient,
            damping,
        });
        if residual <= cfg.tolerance {
            return Ok(SolveOutcome { eta, phi: current, trace, converged: true, final_residual: residual });
        }
        if iteration == cfg.max_iterations {
            return Ok(SolveOutcome { eta, phi: current, trace, converged: false, final_residual: residual });
        }
        if residual > prev {
            increases += 1;
            if increases >= MAX_INCREASES {
                return Err(TorsionError::Diverged { trace });
            }
            if halvings < MAX_HALVINGS {
                damping /= 2.0;
                halvings += 1;
            }
        } else {
            increases = 0;
        }
        prev = residual;
        let step = r.hodge().coexact_part().inverse_laplacian().scale(-damping * scale);
        eta = eta.add(&step);
    }
    unreachable!("loop returns on its last iteration")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormPattern {
    pub initial_residual: f64,
    pub final_residual: f64,
    /// `max_j ‖dη_j‖ / initial residual` for the L², max and gradient norms.
    pub constants: [f64; 3],
    pub residual_monotone: bool,
    pub bounded: bool,
    pub iterations: usize,
}

pub fn estimate_norm_pattern(trace: &IterationTrace) -> NormPattern {
    let Some(first) = trace.rows.first() else {
        return NormPattern {
            initial_residual: 0.0,
            final_residual: 0.0,
            constants: [0.0; 3],
            residual_monotone: true,
            bounded: true,
            iterations: 0,
        };
    };
    let r0 = first.residual;
    let ratio = |f: fn(&TraceRow) -> f64| {
        let m = trace.rows.iter().map(f).fold(0.0, f64::max);
        if r0 > 0.0 {
            m / r0
        } else {
            0.0
        }
    };
    let constants = [ratio(|r| r.d_eta_l2), ratio(|r| r.d_eta_max), ratio(|r| r.d_eta_gradient)];
    NormPattern {
        initial_residual: r0,
        final_residual: trace.rows.last().map_or(0.0, |r| r.residual),
        constants,
        residual_monotone: trace.monotone_after_first(),
        bounded: constants.iter().all(|c| c.is_finite()),
        iterations: trace.rows.len() - 1,
    }
}

/// Convenience: `DEFAULT_ACTIVE` grid at the configured resolution.
pub fn default_grid(resolution: usize) -> SpectralGrid {
    SpectralGrid::new(DEFAULT_ACTIVE.to_vec(), resolution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_structure_has_no_torsion() {
        let g = default_grid(8);
        let phi = perturbed_structure(&g, 0.0, &[default_mode()]).unwrap();
        let (_, n) = torsion_residual(&phi).unwrap();
        assert_eq!(n.l2, 0.0);
        let out = solve(&phi, &SolverConfig { resolution: 8, ..Default::default() }).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations(), 0);
    }

    #[test]
    fn default_mode_converges() {
        let g = default_grid(16);
        let phi = perturbed_structure(&g, 0.01, &[default_mode()]).unwrap();
        let out = solve(&phi, &SolverConfig::default()).unwrap();
        assert!(out.converged);
        assert!(out.final_residual <= 1e-8);
        assert!(out.trace.monotone_after_first());
        assert_eq!(out.phi.mean(), phi.mean());
        assert_eq!(out.phi.d().max_coefficient(), 0.0);
        let p = estimate_norm_pattern(&out.trace);
        assert!(p.bounded && p.residual_monotone);
    }

    #[test]
    fn large_perturbation_rejected() {
        let g = default_grid(16);
        assert!(matches!(
            perturbed_structure(&g, 0.5, &[default_mode()]),
            Err(TorsionError::PerturbationTooLarge { .. })
        ));
    }

    #[test]
    fn mode_parsing() {
        let m = Mode::parse("2,1,1:45", &DEFAULT_ACTIVE).unwrap();
        assert_eq!(m, default_mode());
        assert_eq!(Mode::parse("1,0,0:v4", &DEFAULT_ACTIVE).unwrap().direction, Direction::Vector(3));
        assert!(Mode::parse("0,0,0:45", &DEFAULT_ACTIVE).is_err());
        assert!(Mode::parse("1,0:45", &DEFAULT_ACTIVE).is_err());
        assert!(Mode::parse("1,0,0:54", &DEFAULT_ACTIVE).is_err());
        assert!(Mode::parse("1,0,0:48", &DEFAULT_ACTIVE).is_err());
    }

    #[test]
    fn empty_trace_pattern() {
        let p = estimate_norm_pattern(&IterationTrace::default());
        assert_eq!(p.iterations, 0);
        assert!(p.bounded);
    }
}
