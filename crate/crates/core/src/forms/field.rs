use super::kform::{mask_index, masks, merge_sign, KForm, DIM};
use super::FormError;

/// Regular periodic sample lattice on a flat 7-torus chart. Axes with
/// resolution 1 are inactive: fields are constant along them.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub resolution: [usize; DIM],
    pub period: [f64; DIM],
}

impl Grid {
    pub fn new(resolution: [usize; DIM], period: [f64; DIM]) -> Result<Self, FormError> {
        for a in 0..DIM {
            if resolution[a] == 0 || (resolution[a] > 1 && resolution[a] < 4) {
                return Err(FormError::GridTooCoarse { axis: a, resolution: resolution[a] });
            }
            if !(period[a] > 0.0) {
                return Err(FormError::Shape);
            }
        }
        Ok(Grid { resolution, period })
    }

    /// Unit-period grid with `n` points along each listed axis.
    pub fn unit(active: &[usize], n: usize) -> Result<Self, FormError> {
        let mut res = [1; DIM];
        for &a in active {
            res[a] = n;
        }
        Self::new(res, [1.0; DIM])
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.period[axis] / self.resolution[axis] as f64
    }

    pub fn is_active(&self, axis: usize) -> bool {
        self.resolution[axis] > 1
    }

    /// Row-major strides (axis 6 fastest).
    fn strides(&self) -> [usize; DIM] {
        let mut s = [1; DIM];
        for a in (0..DIM - 1).rev() {
            s[a] = s[a + 1] * self.resolution[a + 1];
        }
        s
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; DIM] {
        let mut idx = [0; DIM];
        for a in (0..DIM).rev() {
            idx[a] = flat % self.resolution[a];
            flat /= self.resolution[a];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> [f64; DIM] {
        let idx = self.multi_index(flat);
        let mut p = [0.0; DIM];
        for a in 0..DIM {
            p[a] = idx[a] as f64 * self.spacing(a);
        }
        p
    }

    /// Flat index of the neighbor `offset` steps along `axis`, wrapping.
    fn shifted(&self, flat: usize, axis: usize, offset: isize) -> usize {
        let idx = self.multi_index(flat);
        let n = self.resolution[axis] as isize;
        let moved = (idx[axis] as isize + offset).rem_euclid(n) as usize;
        flat + moved * self.strides()[axis] - idx[axis] * self.strides()[axis]
    }
}

/// A real k-form sampled at every node of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct FormField {
    grid: Grid,
    degree: usize,
    values: Vec<KForm<f64>>,
}

impl FormField {
    pub fn new(grid: Grid, values: Vec<KForm<f64>>) -> Result<Self, FormError> {
        if values.len() != grid.len() {
            return Err(FormError::Shape);
        }
        let degree = values.first().map_or(0, |v| v.degree());
        if values.iter().any(|v| v.degree() != degree) {
            return Err(FormError::DegreeMismatch(degree, degree + 1));
        }
        Ok(FormField { grid, degree, values })
    }

    pub fn sample(grid: Grid, f: impl Fn(&[f64; DIM]) -> KForm<f64>) -> Result<Self, FormError> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Grid, form: &KForm<f64>) -> Self {
        let values = vec![form.clone(); grid.len()];
        FormField { grid, degree: form.degree(), values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[KForm<f64>] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(KForm::max_abs).fold(0.0, f64::max)
    }

    /// Root mean square of the coefficient 2-norm over nodes.
    pub fn rms(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.coeff_norm().powi(2)).sum();
        (s / self.values.len() as f64).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormError> {
        if self.grid != other.grid {
            return Err(FormError::Shape);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.sub(b)).collect::<Result<_, _>>()?;
        Ok(FormField { grid: self.grid.clone(), degree: self.degree, values })
    }
}

/// Exterior derivative by second-order central differences with periodic
/// wraparound: `d(Σ f_I dx^I) = Σ_j Σ_I ∂_j f_I dx^j ∧ dx^I`.
pub fn exterior_derivative(f: &FormField) -> Result<FormField, FormError> {
    let k = f.degree;
    if k >= DIM {
        return Ok(FormField {
            grid: f.grid.clone(),
            degree: DIM,
            values: vec![KForm::zero(DIM); f.grid.len()],
        });
    }
    let grid = &f.grid;
    let src = masks(k);
    let node = |n: usize| -> KForm<f64> {
        let mut out = vec![0.0; masks(k + 1).len()];
        for axis in 0..DIM {
            if !grid.is_active(axis) {
                continue;
            }
            let h2 = 2.0 * grid.spacing(axis);
            let plus = &f.values[grid.shifted(n, axis, 1)];
            let minus = &f.values[grid.shifted(n, axis, -1)];
            let bit = 1u8 << axis;
            for (i, &m) in src.iter().enumerate() {
                if m & bit != 0 {
                    continue;
                }
                let deriv = (plus.coeffs()[i] - minus.coeffs()[i]) / h2;
                if deriv == 0.0 {
                    continue;
                }
                out[mask_index(m | bit)] += merge_sign(bit, m) as f64 * deriv;
            }
        }
        KForm::from_coeffs(k + 1, out).expect("sized by degree")
    };
    let values = crate::util::par_map_range(grid.len(), node);
    Ok(FormField { grid: grid.clone(), degree: k + 1, values })
}
