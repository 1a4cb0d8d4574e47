//! The Eguchi–Hanson metrics `h_s` on the chart `C^2 \ {0}`.
//!
//! With `ρ = |z|^2` and `q = sqrt(ρ^2 + s^4)` the potential is
//! `F(ρ) = q + s^2 log ρ − s^2 log(q + s^2)`, whose derivatives have the
//! closed forms `F' = q/ρ` and `F'' = −s^4/(q ρ^2)`. The metric is
//! `h_{ij̄} = F' δ_ij + F'' z̄_i z_j`, and `det h = 1` identically.
//!
//! Real chart coordinates are ordered `(x1, y1, x2, y2)` with `z_k = x_k + i y_k`.
//! Two-forms on the chart are embedded in R^7 on axes 3..6, leaving axes
//! 0..2 for the flat `R^3` factor of the product G2-structure.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::forms::{self, KForm};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EhError {
    #[error("parameter s must be nonnegative, got {0}")]
    BadParameter(f64),
    #[error("point must differ from the origin (r = {0})")]
    Origin(f64),
    #[error("finite-difference step {step} too large for r = {r}")]
    StepTooLarge { step: f64, r: f64 },
    #[error("decay fit needs at least 4 increasing radii spanning a decade, starting at 5s or more")]
    BadRadii,
    #[error("all deviations vanish; nothing to fit")]
    Degenerate,
}

/// Offset of the chart axes inside R^7.
pub const CHART_AXIS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl ChartPoint {
    pub fn new(z1: Complex64, z2: Complex64) -> Self {
        ChartPoint { z1, z2 }
    }

    pub fn real(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        ChartPoint { z1: Complex64::new(x1, y1), z2: Complex64::new(x2, y2) }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }

    pub fn from_coords(c: [f64; 4]) -> Self {
        Self::real(c[0], c[1], c[2], c[3])
    }

    pub fn rho(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    pub fn r(&self) -> f64 {
        self.rho().sqrt()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        ChartPoint { z1: self.z1 * lambda, z2: self.z2 * lambda }
    }

    fn z(&self) -> [Complex64; 2] {
        [self.z1, self.z2]
    }

    fn checked(&self) -> Result<f64, EhError> {
        let rho = self.rho();
        if rho > 0.0 && rho.is_finite() {
            Ok(rho)
        } else {
            Err(EhError::Origin(rho.sqrt()))
        }
    }
}

fn check_s(s: f64) -> Result<(), EhError> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(EhError::BadParameter(s))
    }
}

/// `f_s(r) = sqrt(r^4 + s^4) + 2 s^2 log r − s^2 log(sqrt(r^4 + s^4) + s^2)`.
pub fn kahler_potential(s: f64, r: f64) -> Result<f64, EhError> {
    check_s(s)?;
    if !(r > 0.0) {
        return Err(EhError::Origin(r));
    }
    if s == 0.0 {
        return Ok(r * r);
    }
    let s2 = s * s;
    let q = (r.powi(4) + s2 * s2).sqrt();
    Ok(q + 2.0 * s2 * r.ln() - s2 * (q + s2).ln())
}

/// `(F'(ρ) − 1, F''(ρ))`, with the first computed without cancellation.
pub fn potential_derivatives(s: f64, rho: f64) -> (f64, f64) {
    let s4 = s.powi(4);
    let q = (rho * rho + s4).sqrt();
    (s4 / (rho * (q + rho)), -s4 / (q * rho * rho))
}

/// Pointwise Hermitian metric `h_{ij̄}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMetricSample {
    pub h: [[Complex64; 2]; 2],
}

impl HermitianMetricSample {
    pub fn det(&self) -> f64 {
        (self.h[0][0] * self.h[1][1] - self.h[0][1] * self.h[1][0]).re
    }

    /// `g(u, v) = Re Σ h_{ij̄} u_i v̄_j` as a 4×4 matrix in `(x1, y1, x2, y2)`.
    pub fn real_form(&self) -> [[f64; 4]; 4] {
        let mut g = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                let h = self.h[i][j];
                g[2 * i][2 * j] = h.re;
                g[2 * i + 1][2 * j + 1] = h.re;
                g[2 * i][2 * j + 1] = h.im;
                g[2 * i + 1][2 * j] = -h.im;
            }
        }
        g
    }

    pub fn is_positive_definite(&self) -> bool {
        self.h[0][0].re > 0.0 && self.det() > 0.0
    }
}

/// `h − I`, evaluated without subtracting nearly equal numbers.
pub fn metric_deviation(s: f64, p: &ChartPoint) -> Result<[[Complex64; 2]; 2], EhError> {
    check_s(s)?;
    let rho = p.checked()?;
    let (fp_minus_one, fpp) = potential_derivatives(s, rho);
    let z = p.z();
    let mut d = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            d[i][j] = z[i].conj() * z[j] * fpp;
        }
        d[i][i] += fp_minus_one;
    }
    Ok(d)
}

pub fn metric_sample(s: f64, p: &ChartPoint) -> Result<HermitianMetricSample, EhError> {
    let mut h = metric_deviation(s, p)?;
    h[0][0] += 1.0;
    h[1][1] += 1.0;
    Ok(HermitianMetricSample { h })
}

/// Second-order central-difference approximation of `∂_i ∂_j̄ u` at `p`,
/// using `∂_i ∂_j̄ = ¼ [(∂x_i ∂x_j + ∂y_i ∂y_j) + i (∂x_i ∂y_j − ∂y_i ∂x_j)]`.
pub fn complex_hessian(u: impl Fn(&ChartPoint) -> f64, p: &ChartPoint, step: f64) -> [[Complex64; 2]; 2] {
    let base = p.coords();
    let at = |shifts: &[(usize, f64)]| {
        let mut c = base;
        for &(a, d) in shifts {
            c[a] += d;
        }
        u(&ChartPoint::from_coords(c))
    };
    let u0 = at(&[]);
    let mut d2 = [[0.0; 4]; 4];
    for a in 0..4 {
        d2[a][a] = (at(&[(a, step)]) - 2.0 * u0 + at(&[(a, -step)])) / (step * step);
        for b in (a + 1)..4 {
            let v = (at(&[(a, step), (b, step)]) - at(&[(a, step), (b, -step)]) - at(&[(a, -step), (b, step)])
                + at(&[(a, -step), (b, -step)]))
                / (4.0 * step * step);
            d2[a][b] = v;
            d2[b][a] = v;
        }
    }
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            out[i][j] = Complex64::new(d2[xi][xj] + d2[yi][yj], d2[xi][yj] - d2[yi][xj]) * 0.25;
        }
    }
    out
}

fn max_entry(m: &[[Complex64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}

fn check_step(p: &ChartPoint, step: f64) -> Result<(), EhError> {
    let r = p.r();
    if !(step > 0.0) || 2.0 * step >= r {
        return Err(EhError::StepTooLarge { step, r });
    }
    Ok(())
}

/// `max |Ric_{ij̄}|` with `Ric = −∂∂̄ log det h` by central differences.
pub fn ricci_check(s: f64, p: &ChartPoint, step: f64) -> Result<f64, EhError> {
    check_s(s)?;
    p.checked()?;
    check_step(p, step)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let hess = complex_hessian(|q| metric_sample(s, q).map(|h| h.det().ln()).unwrap_or(f64::NAN), p, step);
    Ok(max_entry(&hess))
}

/// Stencil error of [`complex_hessian`] on `G = log F'`, against the closed
/// form `∂_i∂_j̄ G = G' δ_ij + G'' z̄_i z_j` with `G' = ρ/q^2 − 1/ρ` and
/// `G'' = (s^4 − ρ^2)/q^4 + 1/ρ^2`. Unlike the Ricci residual, this has a
/// nonzero truncation term, so it exhibits the stencil's order.
pub fn stencil_error(s: f64, p: &ChartPoint, step: f64) -> Result<f64, EhError> {
    check_s(s)?;
    let rho = p.checked()?;
    check_step(p, step)?;
    let s4 = s.powi(4);
    let g = |q: &ChartPoint| {
        let rho = q.rho();
        let (d, _) = potential_derivatives(s, rho);
        d.ln_1p()
    };
    let q2 = rho * rho + s4;
    let g1 = rho / q2 - 1.0 / rho;
    let g2 = (s4 - rho * rho) / (q2 * q2) + 1.0 / (rho * rho);
    let z = p.z();
    let numeric = complex_hessian(g, p, step);
    let mut err: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut exact = z[i].conj() * z[j] * g2;
            if i == j {
                exact += g1;
            }
            err = err.max((numeric[i][j] - exact).norm());
        }
    }
    Ok(err)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub order: usize,
    pub exponent: f64,
    pub residual: f64,
    pub radii: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Direction used for radial samples; generic so no coordinate symmetry hides terms.
fn unit_direction() -> ChartPoint {
    let c = [0.6, 0.3, -0.5, 0.548];
    let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    ChartPoint::from_coords(c.map(|x| x / n))
}

fn frob(m: &[[Complex64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Size of `∇^k (h_s − h_0)` at radius `r`, for `k ∈ {0, 1}`.
pub fn deviation_norm(s: f64, r: f64, order: usize) -> Result<f64, EhError> {
    let p = unit_direction().scaled(r);
    match order {
        0 => Ok(frob(&metric_deviation(s, &p)?)),
        _ => {
            let h = 1e-3 * r;
            let mut total = 0.0;
            for a in 0..4 {
                let mut plus = p.coords();
                let mut minus = p.coords();
                plus[a] += h;
                minus[a] -= h;
                let dp = metric_deviation(s, &ChartPoint::from_coords(plus))?;
                let dm = metric_deviation(s, &ChartPoint::from_coords(minus))?;
                let mut diff = [[Complex64::new(0.0, 0.0); 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        diff[i][j] = (dp[i][j] - dm[i][j]) / (2.0 * h);
                    }
                }
                total += frob(&diff).powi(2);
            }
            Ok(total.sqrt())
        }
    }
}

/// Least-squares slope of `log ‖∇^k(h_s − I)‖` against `log r`.
pub fn ale_decay_fit(s: f64, radii: &[f64], order: usize) -> Result<DecayFit, EhError> {
    check_s(s)?;
    if radii.len() < 4
        || radii.windows(2).any(|w| !(w[1] > w[0]))
        || radii[radii.len() - 1] < 10.0 * radii[0]
        || radii[0] < 5.0 * s
        || !(radii[0] > 0.0)
    {
        return Err(EhError::BadRadii);
    }
    let norms = radii.iter().map(|&r| deviation_norm(s, r, order)).collect::<Result<Vec<_>, _>>()?;
    if norms.iter().any(|&n| !(n > 0.0)) {
        return Err(EhError::Degenerate);
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DecayFit { order, exponent: slope, residual, radii: radii.to_vec(), norms })
}

/// Five log-spaced radii over `[10 s, 1000 s]`.
pub fn default_radii(s: f64) -> Vec<f64> {
    [10.0, 30.0, 100.0, 300.0, 1000.0].iter().map(|k| k * s).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingResult {
    /// Residual against `λ^2 ω_{λ s}`.
    pub residual_lambda_s: f64,
    /// Residual against `λ^2 ω_{s/λ}`.
    pub residual_s_over_lambda: f64,
}

impl ScalingResult {
    /// The candidate matching to `tol`, if exactly one does.
    pub fn winner(&self, tol: f64) -> Option<&'static str> {
        match (self.residual_lambda_s <= tol, self.residual_s_over_lambda <= tol) {
            (true, false) => Some("lambda*s"),
            (false, true) => Some("s/lambda"),
            _ => None,
        }
    }
}

/// Compares the pullback of `ω_s` under `z ↦ λ z`, i.e. `λ^2 h_s(λ p)`, with
/// both candidate rescalings at `p`.
pub fn scaling_check(s: f64, lambda: f64, p: &ChartPoint) -> Result<ScalingResult, EhError> {
    if !(lambda > 0.0) {
        return Err(EhError::BadParameter(lambda));
    }
    let l2 = lambda * lambda;
    let pulled = metric_deviation(s, &p.scaled(lambda))?;
    let res = |s2: f64| -> Result<f64, EhError> {
        let cand = metric_deviation(s2, p)?;
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max(((pulled[i][j] - cand[i][j]) * l2).norm());
            }
        }
        Ok(m)
    };
    Ok(ScalingResult { residual_lambda_s: res(lambda * s)?, residual_s_over_lambda: res(s / lambda)? })
}

/// The three Kähler forms at a point, as constant 2-forms on chart axes of R^7.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperKahlerTriple {
    pub kappa_i: KForm<f64>,
    pub kappa_j: KForm<f64>,
    pub kappa_k: KForm<f64>,
}

fn chart(a: usize) -> KForm<f64> {
    KForm::dx(CHART_AXIS + a)
}

fn w(a: &KForm<f64>, b: &KForm<f64>) -> KForm<f64> {
    a.wedge(b).expect("degrees fit")
}

impl HyperKahlerTriple {
    /// Top coefficients of `κ_I^2, κ_J^2, κ_K^2` on the chart.
    pub fn squares(&self) -> [f64; 3] {
        let top = |k: &KForm<f64>| w(k, k).coeff(&[3, 4, 5, 6]);
        [top(&self.kappa_i), top(&self.kappa_j), top(&self.kappa_k)]
    }

    /// Largest of `|κ_a ∧ κ_b|` over distinct pairs.
    pub fn max_cross(&self) -> f64 {
        let ks = [&self.kappa_i, &self.kappa_j, &self.kappa_k];
        let mut m: f64 = 0.0;
        for a in 0..3 {
            for b in (a + 1)..3 {
                m = m.max(w(ks[a], ks[b]).max_abs());
            }
        }
        m
    }
}

/// `κ_I = ω_s = (i/2) Σ h_{ij̄} dz_i ∧ dz̄_j`; `κ_J + i κ_K = dz_1 ∧ dz_2`.
pub fn hyperkahler_triple(s: f64, p: &ChartPoint) -> Result<HyperKahlerTriple, EhError> {
    let h = metric_sample(s, p)?.h;
    let (x, y) = (|i: usize| chart(2 * i), |i: usize| chart(2 * i + 1));
    let mut kappa_i = KForm::zero(2);
    for i in 0..2 {
        for j in 0..2 {
            let c = h[i][j];
            // (i/2) c (dx_i + i dy_i) ∧ (dx_j − i dy_j), real part.
            let xx = -c.im / 2.0;
            let xy = c.re / 2.0;
            let yx = -c.re / 2.0;
            let yy = -c.im / 2.0;
            for (coef, a, b) in [(xx, x(i), x(j)), (xy, x(i), y(j)), (yx, y(i), x(j)), (yy, y(i), y(j))] {
                kappa_i = kappa_i.add(&w(&a, &b).scale(&coef)).expect("same degree");
            }
        }
    }
    let kappa_j = w(&x(0), &x(1)).sub(&w(&y(0), &y(1))).expect("same degree");
    let kappa_k = w(&x(0), &y(1)).add(&w(&y(0), &x(1))).expect("same degree");
    Ok(HyperKahlerTriple { kappa_i, kappa_j, kappa_k })
}

/// `φ = a^3 dx123 + a dx1∧κ_I + a dx2∧κ_J − a dx3∧κ_K`, the product of a flat
/// `R^3` of scale `a` with the Eguchi–Hanson chart.
pub fn product_g2_form(s: f64, p: &ChartPoint, torus_scale: f64) -> Result<KForm<f64>, EhError> {
    let t = hyperkahler_triple(s, p)?;
    Ok(su2_product(&t, torus_scale))
}

pub fn su2_product(t: &HyperKahlerTriple, a: f64) -> KForm<f64> {
    let d = |i| KForm::<f64>::dx(i);
    let vol3 = w(&w(&d(0), &d(1)), &d(2)).scale(&(a * a * a));
    vol3.add(&w(&d(0), &t.kappa_i).scale(&a))
        .and_then(|f| f.add(&w(&d(1), &t.kappa_j).scale(&a)))
        .and_then(|f| f.sub(&w(&d(2), &t.kappa_k).scale(&a)))
        .expect("degree 3 throughout")
}

/// Expected metric of [`product_g2_form`]: `a^2 I_3 ⊕ real_form(h_s)`.
pub fn expected_product_metric(s: f64, p: &ChartPoint, a: f64) -> Result<Vec<Vec<f64>>, EhError> {
    let g4 = metric_sample(s, p)?.real_form();
    let mut g = vec![vec![0.0; 7]; 7];
    for (i, row) in g.iter_mut().enumerate().take(3) {
        row[i] = a * a;
    }
    for i in 0..4 {
        for j in 0..4 {
            g[CHART_AXIS + i][CHART_AXIS + j] = g4[i][j];
        }
    }
    Ok(g)
}

/// `‖∂^2 h_s‖` at radius `s`: a curvature-size proxy expected to scale as `s^{-2}`.
pub fn curvature_proxy(s: f64) -> Result<f64, EhError> {
    check_s(s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let p = unit_direction().scaled(s);
    let h = 1e-3 * s;
    let base = metric_deviation(s, &p)?;
    let mut total = 0.0;
    for a in 0..4 {
        let mut plus = p.coords();
        let mut minus = p.coords();
        plus[a] += h;
        minus[a] -= h;
        let dp = metric_deviation(s, &ChartPoint::from_coords(plus))?;
        let dm = metric_deviation(s, &ChartPoint::from_coords(minus))?;
        for i in 0..2 {
            for j in 0..2 {
                total += ((dp[i][j] - 2.0 * base[i][j] + dm[i][j]) / (h * h)).norm_sqr();
            }
        }
    }
    Ok(total.sqrt())
}

/// Uniformly random chart point with coordinates in `[-scale, scale]`,
/// away from the origin.
pub fn random_point(rng: &mut impl Rng, scale: f64) -> ChartPoint {
    loop {
        let c: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-scale..scale));
        let p = ChartPoint::from_coords(c);
        if p.r() > 0.05 * scale {
            return p;
        }
    }
}

/// Summary of all Eguchi–Hanson checks at one parameter value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EhReport {
    pub s: f64,
    pub samples: usize,
    pub det_h_max_dev: f64,
    pub ricci_max: f64,
    pub ricci_step: f64,
    pub stencil_order: f64,
    pub ale_exponent_k0: f64,
    pub ale_exponent_k1: f64,
    pub scaling_winner: Option<String>,
    pub scaling_max_residual: f64,
    pub product_positive: bool,
    pub curvature_proxy: f64,
}

pub fn eh_report(s: f64, samples: usize, seed: u64) -> Result<EhReport, EhError> {
    check_s(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 2.0 * s.max(0.5);
    let mut det_dev: f64 = 0.0;
    let mut ricci: f64 = 0.0;
    let mut positive = true;
    let step = 1e-3;
    for _ in 0..samples {
        let p = random_point(&mut rng, scale);
        det_dev = det_dev.max((metric_sample(s, &p)?.det() - 1.0).abs());
        if p.r() > 4.0 * step {
            ricci = ricci.max(ricci_check(s, &p, step)?);
        }
        positive &= forms::is_positive(&product_g2_form(s, &p, 1.0)?);
    }
    let probe = ChartPoint::real(0.7 * s.max(0.5), 0.2, -0.4, 0.9 * s.max(0.5));
    let e1 = stencil_error(s.max(f64::MIN_POSITIVE), &probe, 1e-2)?;
    let e2 = stencil_error(s.max(f64::MIN_POSITIVE), &probe, 5e-3)?;
    let (k0, k1) = if s > 0.0 {
        let radii = default_radii(s);
        (ale_decay_fit(s, &radii, 0)?.exponent, ale_decay_fit(s, &radii, 1)?.exponent)
    } else {
        (f64::NAN, f64::NAN)
    };
    let mut winner: Option<&str> = None;
    let mut consistent = true;
    let mut max_res: f64 = 0.0;
    for _ in 0..if s > 0.0 { 20 } else { 0 } {
        let lambda = rng.gen_range(1.2..3.0);
        let p = random_point(&mut rng, scale);
        let r = scaling_check(s, lambda, &p)?;
        let w = r.winner(1e-10);
        max_res = max_res.max(r.residual_lambda_s.min(r.residual_s_over_lambda));
        consistent &= w.is_some() && (winner.is_none() || winner == w);
        winner = winner.or(w);
    }
    Ok(EhReport {
        s,
        samples,
        det_h_max_dev: det_dev,
        ricci_max: ricci,
        ricci_step: step,
        stencil_order: (e1 / e2).log2(),
        ale_exponent_k0: k0,
        ale_exponent_k1: k1,
        scaling_winner: if consistent { winner.map(String::from) } else { None },
        scaling_max_residual: max_res,
        product_positive: positive,
        curvature_proxy: curvature_proxy(s)?,
    })
}
