//! Band-limited Fourier fields of forms on the flat torus `(R/2πZ)^7`,
//! varying along a chosen subset of active axes.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::forms::{binomial7, KForm, DIM};
use crate::forms::{mask_index, masks, merge_sign};

/// Frequency grid: `n` nodes per active axis, band `|k_a| ≤ n / 4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralGrid {
    active: Vec<usize>,
    n: usize,
}

impl SpectralGrid {
    pub fn new(active: Vec<usize>, n: usize) -> Self {
        SpectralGrid { active, n }
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn band(&self) -> i64 {
        (self.n / 4) as i64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.active.len() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Integer frequency of slot `idx` (FFT ordering, last active axis fastest).
    pub fn frequency(&self, idx: usize) -> [i64; DIM] {
        let mut k = [0i64; DIM];
        let mut rest = idx;
        for &axis in self.active.iter().rev() {
            let j = rest % self.n;
            rest /= self.n;
            k[axis] = if j < self.n / 2 { j as i64 } else { j as i64 - self.n as i64 };
        }
        k
    }

    /// Slot of an integer frequency, if it lies on this grid.
    pub fn slot(&self, k: &[i64; DIM]) -> Option<usize> {
        let mut idx = 0;
        for axis in 0..DIM {
            if !self.active.contains(&axis) && k[axis] != 0 {
                return None;
            }
        }
        for &axis in &self.active {
            let half = (self.n / 2) as i64;
            if k[axis] < -half || k[axis] >= half {
                return None;
            }
            idx = idx * self.n + k[axis].rem_euclid(self.n as i64) as usize;
        }
        Some(idx)
    }

    pub fn in_band(&self, k: &[i64; DIM]) -> bool {
        k.iter().all(|x| x.abs() <= self.band())
    }

    /// Grid point of node `idx` (same ordering as frequencies).
    pub fn point(&self, idx: usize) -> [f64; DIM] {
        let mut x = [0.0; DIM];
        let mut rest = idx;
        for &axis in self.active.iter().rev() {
            x[axis] = 2.0 * std::f64::consts::PI * (rest % self.n) as f64 / self.n as f64;
            rest /= self.n;
        }
        x
    }

    fn fft(&self, data: &mut [Complex64], inverse: bool) {
        let mut planner = FftPlanner::new();
        let plan = if inverse { planner.plan_fft_inverse(self.n) } else { planner.plan_fft_forward(self.n) };
        let a = self.active.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        for dim in 0..a {
            let stride = self.n.pow((a - 1 - dim) as u32);
            for start in 0..self.len() {
                if (start / stride) % self.n != 0 {
                    continue;
                }
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = data[start + j * stride];
                }
                plan.process(&mut buf);
                for (j, b) in buf.iter().enumerate() {
                    data[start + j * stride] = *b;
                }
            }
        }
    }
}

/// Fourier coefficients of a real k-form field: one array per component,
/// normalized so that `f(x) = Σ_k c_k e^{i k·x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: SpectralGrid,
    degree: usize,
    comps: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn zero(grid: &SpectralGrid, degree: usize) -> Self {
        SpectralField {
            grid: grid.clone(),
            degree,
            comps: vec![vec![Complex64::new(0.0, 0.0); grid.len()]; binomial7(degree)],
        }
    }

    /// Constant field.
    pub fn constant(grid: &SpectralGrid, form: &KForm<f64>) -> Self {
        let mut f = Self::zero(grid, form.degree());
        for (c, v) in f.comps.iter_mut().zip(form.coeffs()) {
            c[0] = Complex64::new(*v, 0.0);
        }
        f
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn coefficient(&self, comp: usize, k: &[i64; DIM]) -> Complex64 {
        self.grid.slot(k).map_or(Complex64::new(0.0, 0.0), |s| self.comps[comp][s])
    }

    pub fn add_coefficient(&mut self, comp: usize, k: &[i64; DIM], c: Complex64) {
        if let Some(s) = self.grid.slot(k) {
            self.comps[comp][s] += c;
        }
    }

    /// Constant (zero-frequency) part.
    pub fn mean(&self) -> KForm<f64> {
        KForm::from_coeffs(self.degree, self.comps.iter().map(|c| c[0].re).collect()).expect("sized by degree")
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        SpectralField { grid: self.grid.clone(), degree: self.degree, comps }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        let comps = self.comps.iter().map(|c| c.iter().map(|x| x * s).collect()).collect();
        SpectralField { grid: self.grid.clone(), degree: self.degree, comps }
    }

    /// Per-frequency map from the coefficients at `k` to new coefficients.
    fn map_frequencies(&self, degree: usize, f: impl Fn(&[i64; DIM], &[Complex64], &mut [Complex64])) -> Self {
        let mut out = Self::zero(&self.grid, degree);
        let mut src = vec![Complex64::new(0.0, 0.0); self.comps.len()];
        let mut dst = vec![Complex64::new(0.0, 0.0); out.comps.len()];
        for s in 0..self.grid.len() {
            if self.comps.iter().all(|c| c[s] == Complex64::new(0.0, 0.0)) {
                continue;
            }
            for (v, c) in src.iter_mut().zip(&self.comps) {
                *v = c[s];
            }
            dst.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            f(&self.grid.frequency(s), &src, &mut dst);
            for (c, v) in out.comps.iter_mut().zip(&dst) {
                c[s] = *v;
            }
        }
        out
    }

    /// Exterior derivative: `(dα)^ = i k ∧ α^`.
    pub fn d(&self) -> Self {
        let p = self.degree;
        if p >= DIM {
            return Self::zero(&self.grid, DIM);
        }
        self.map_frequencies(p + 1, |k, src, dst| {
            for (i, &m) in masks(p).iter().enumerate() {
                for (axis, &ka) in k.iter().enumerate() {
                    let bit = 1u8 << axis;
                    if ka == 0 || m & bit != 0 {
                        continue;
                    }
                    dst[mask_index(m | bit)] += Complex64::new(0.0, (ka * merge_sign(bit, m) as i64) as f64) * src[i];
                }
            }
        })
    }

    /// Flat codifferential: `(d*α)^ = −i Σ k_a ι_a α^`.
    pub fn codifferential(&self) -> Self {
        let p = self.degree;
        if p == 0 {
            return Self::zero(&self.grid, 0);
        }
        self.map_frequencies(p - 1, |k, src, dst| {
            for (i, &m) in masks(p).iter().enumerate() {
                for (axis, &ka) in k.iter().enumerate() {
                    let bit = 1u8 << axis;
                    if ka == 0 || m & bit == 0 {
                        continue;
                    }
                    let sign = merge_sign(bit, m & !bit) as i64;
                    dst[mask_index(m & !bit)] += Complex64::new(0.0, -(ka * sign) as f64) * src[i];
                }
            }
        })
    }

    /// Flat Hodge star, coefficientwise.
    pub fn hodge(&self) -> Self {
        let p = self.degree;
        let mut out = Self::zero(&self.grid, DIM - p);
        for (i, &m) in masks(p).iter().enumerate() {
            let comp = 0x7f & !m;
            let sign = merge_sign(m, comp) as f64;
            out.comps[mask_index(comp)] = self.comps[i].iter().map(|x| x * sign).collect();
        }
        out
    }

    /// Inverse flat Laplacian `|k|^{-2}`, annihilating the zero mode.
    pub fn inverse_laplacian(&self) -> Self {
        let mut out = self.clone();
        for s in 0..self.grid.len() {
            let k = self.grid.frequency(s);
            let k2: i64 = k.iter().map(|x| x * x).sum();
            for c in out.comps.iter_mut() {
                c[s] = if k2 == 0 { Complex64::new(0.0, 0.0) } else { c[s] / k2 as f64 };
            }
        }
        out
    }

    /// Coexact part: `α − d Δ⁻¹ d* α` with the zero mode removed.
    pub fn coexact_part(&self) -> Self {
        let exact = self.codifferential().inverse_laplacian().d();
        let mut out = self.sub(&exact);
        for c in out.comps.iter_mut() {
            c[0] = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// Zeroes every coefficient outside the band.
    pub fn truncate(&mut self) {
        for s in 0..self.grid.len() {
            if !self.grid.in_band(&self.grid.frequency(s)) {
                for c in self.comps.iter_mut() {
                    c[s] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Values on the grid, one real array per component.
    pub fn to_grid(&self) -> Vec<Vec<f64>> {
        self.comps
            .iter()
            .map(|c| {
                let mut data = c.clone();
                self.grid.fft(&mut data, true);
                data.iter().map(|z| z.re).collect()
            })
            .collect()
    }

    /// Transforms grid values (one array per component) to coefficients.
    pub fn from_grid(grid: &SpectralGrid, degree: usize, values: &[Vec<f64>]) -> Self {
        let scale = 1.0 / grid.len() as f64;
        let comps = values
            .iter()
            .map(|v| {
                let mut data: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                grid.fft(&mut data, false);
                data.iter().map(|z| z * scale).collect()
            })
            .collect();
        SpectralField { grid: grid.clone(), degree, comps }
    }

    /// Pointwise forms at each grid node.
    pub fn node_forms(&self) -> Vec<KForm<f64>> {
        let vals = self.to_grid();
        (0..self.grid.len())
            .map(|n| KForm::from_coeffs(self.degree, vals.iter().map(|c| c[n]).collect()).expect("sized by degree"))
            .collect()
    }

    /// Root mean square over the grid (Parseval).
    pub fn rms(&self) -> f64 {
        self.comps.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute component value on the grid.
    pub fn max_abs(&self) -> f64 {
        self.to_grid().iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// RMS of `|k| · |c_k|`, a proxy for the gradient norm.
    pub fn gradient_rms(&self) -> f64 {
        let mut s = 0.0;
        for slot in 0..self.grid.len() {
            let k2: i64 = self.grid.frequency(slot).iter().map(|x| x * x).sum();
            for c in &self.comps {
                s += k2 as f64 * c[slot].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_coefficient(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }
}
