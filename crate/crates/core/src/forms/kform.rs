use std::sync::OnceLock;

use crate::linalg;
use crate::scalar::{Domain, Scalar};

use super::FormError;

pub const DIM: usize = 7;

struct Tables {
    /// `masks[k]` lists the k-element subsets of {0..6} as bitmasks, lexicographic.
    masks: Vec<Vec<u8>>,
    /// Position of a mask within `masks[popcount]`.
    index: [usize; 128],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut masks = vec![Vec::new(); DIM + 1];
        let mut all: Vec<u8> = (0u8..128).collect();
        all.sort_by_key(|&m| {
            let idx: Vec<u32> = (0..7).filter(|i| m & (1 << i) != 0).collect();
            (m.count_ones(), idx)
        });
        let mut index = [0usize; 128];
        for m in all {
            let k = m.count_ones() as usize;
            index[m as usize] = masks[k].len();
            masks[k].push(m);
        }
        Tables { masks, index }
    })
}

pub(crate) fn masks(k: usize) -> &'static [u8] {
    &tables().masks[k]
}

pub(crate) fn mask_index(m: u8) -> usize {
    tables().index[m as usize]
}

pub fn binomial7(k: usize) -> usize {
    masks(k).len()
}

/// Axes of a mask, ascending, 0-based.
pub fn mask_axes(m: u8) -> Vec<usize> {
    (0..DIM).filter(|i| m & (1 << i) != 0).collect()
}

fn axes_mask(axes: &[usize]) -> Result<u8, FormError> {
    let mut m = 0u8;
    for w in axes.windows(2) {
        if w[0] >= w[1] {
            return Err(FormError::BadIndex(format!("{axes:?}")));
        }
    }
    for &a in axes {
        if a >= DIM {
            return Err(FormError::BadIndex(format!("{axes:?}")));
        }
        m |= 1 << a;
    }
    Ok(m)
}

/// Sign of the shuffle placing the sorted set `a` before the disjoint set `b`.
pub(crate) fn merge_sign(a: u8, b: u8) -> i32 {
    let mut inversions = 0;
    for i in 0..DIM {
        if a & (1 << i) != 0 {
            inversions += (b & ((1u8 << i) - 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// An alternating k-form on R^7 with coefficients in a [`Scalar`] domain.
///
/// Coefficients are stored densely, one slot per increasing index tuple in
/// lexicographic order. Axes are 0-based in the API; the textual monomial
/// notation (`"123"`) and JSON use the 1-based convention.
#[derive(Clone, Debug, PartialEq)]
pub struct KForm<T: Scalar> {
    degree: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> KForm<T> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "degree {degree} exceeds 7");
        KForm { degree, coeffs: vec![T::zero(); binomial7(degree)] }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<T>) -> Result<Self, FormError> {
        if degree > DIM {
            return Err(FormError::DegreeOverflow(degree));
        }
        if coeffs.len() != binomial7(degree) {
            return Err(FormError::CoefficientCount { degree, got: coeffs.len() });
        }
        Ok(KForm { degree, coeffs })
    }

    /// The constant 0-form `c`.
    pub fn scalar(c: T) -> Self {
        KForm { degree: 0, coeffs: vec![c] }
    }

    /// `c · dx^{axes}` with 0-based, strictly increasing axes.
    pub fn monomial(axes: &[usize], c: T) -> Result<Self, FormError> {
        let m = axes_mask(axes)?;
        let mut f = Self::zero(axes.len());
        f.coeffs[mask_index(m)] = c;
        Ok(f)
    }

    /// Builds a form from terms written as 1-based digit strings, e.g.
    /// `[("123", 1), ("257", -1)]`.
    pub fn from_terms(degree: usize, terms: &[(&str, i64)]) -> Result<Self, FormError> {
        let mut f = Self::zero(degree);
        for (label, c) in terms {
            let axes = parse_label(label)?;
            if axes.len() != degree {
                return Err(FormError::BadIndex(label.to_string()));
            }
            let m = axes_mask(&axes)?;
            let slot = &mut f.coeffs[mask_index(m)];
            *slot = slot.clone() + T::from_i64(*c);
        }
        Ok(f)
    }

    /// The 1-form `dx^axis`.
    pub fn dx(axis: usize) -> Self {
        Self::monomial(&[axis], T::one()).expect("axis below 7")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn domain(&self) -> Domain {
        T::DOMAIN
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, axes: &[usize]) -> T {
        match axes_mask(axes) {
            Ok(m) if axes.len() == self.degree => self.coeffs[mask_index(m)].clone(),
            _ => T::zero(),
        }
    }

    pub fn set_coeff(&mut self, axes: &[usize], c: T) -> Result<(), FormError> {
        if axes.len() != self.degree {
            return Err(FormError::BadIndex(format!("{axes:?}")));
        }
        let m = axes_mask(axes)?;
        self.coeffs[mask_index(m)] = c;
        Ok(())
    }

    /// Iterates `(axes, coefficient)` over nonzero slots.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &T)> + '_ {
        masks(self.degree)
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&m, c)| (mask_axes(m), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    /// Euclidean 2-norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.degree == other.degree
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| (a.to_f64() - b.to_f64()).abs() <= tol)
    }

    fn same_degree(&self, other: &Self) -> Result<(), FormError> {
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormError> {
        self.same_degree(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(KForm { degree: self.degree, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormError> {
        self.same_degree(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(KForm { degree: self.degree, coeffs })
    }

    pub fn scale(&self, c: &T) -> Self {
        KForm { degree: self.degree, coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        KForm { degree: self.degree, coeffs: self.coeffs.iter().map(|a| -a.clone()).collect() }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, FormError> {
        let degree = self.degree + other.degree;
        if degree > DIM {
            return Err(FormError::DegreeOverflow(degree));
        }
        let mut out = Self::zero(degree);
        let ma = masks(self.degree);
        let mb = masks(other.degree);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() || ma[i] & mb[j] != 0 {
                    continue;
                }
                let slot = &mut out.coeffs[mask_index(ma[i] | mb[j])];
                let term = a.clone() * b.clone();
                *slot = if merge_sign(ma[i], mb[j]) > 0 { slot.clone() + term } else { slot.clone() - term };
            }
        }
        Ok(out)
    }

    /// Interior product `v ⌟ self`; a 0-form maps to zero of degree 0.
    pub fn interior(&self, v: &[T]) -> Self {
        if self.degree == 0 {
            return Self::zero(0);
        }
        let mut out = Self::zero(self.degree - 1);
        for (&m, c) in masks(self.degree).iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            for (pos, axis) in mask_axes(m).into_iter().enumerate() {
                if v[axis].is_zero() {
                    continue;
                }
                let slot = &mut out.coeffs[mask_index(m & !(1 << axis))];
                let term = c.clone() * v[axis].clone();
                *slot = if pos % 2 == 0 { slot.clone() + term } else { slot.clone() - term };
            }
        }
        out
    }

    /// Interior product with the basis vector `e_axis`.
    pub fn contract_axis(&self, axis: usize) -> Self {
        let mut v = vec![T::zero(); DIM];
        v[axis] = T::one();
        self.interior(&v)
    }

    /// Evaluates the form on `degree` vectors.
    pub fn evaluate(&self, vectors: &[Vec<T>]) -> Result<T, FormError> {
        if vectors.len() != self.degree {
            return Err(FormError::DegreeMismatch(self.degree, vectors.len()));
        }
        let mut total = T::zero();
        for (&m, c) in masks(self.degree).iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let axes = mask_axes(m);
            let sub: Vec<Vec<T>> = axes.iter().map(|&a| vectors.iter().map(|v| v[a].clone()).collect()).collect();
            total = total + c.clone() * linalg::det(&sub);
        }
        Ok(total)
    }

    /// Pullback under the linear map `x ↦ A x` (`a` is 7×7, row-major):
    /// `(A^*α)_J = Σ_I α_I det A[I,J]`.
    pub fn pullback(&self, a: &[Vec<T>]) -> Self {
        let k = self.degree;
        let mut out = Self::zero(k);
        let ms = masks(k);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let rows = mask_axes(ms[i]);
            for (j, &mj) in ms.iter().enumerate() {
                let cols = mask_axes(mj);
                let sub: Vec<Vec<T>> =
                    rows.iter().map(|&r| cols.iter().map(|&cc| a[r][cc].clone()).collect()).collect();
                let d = linalg::det(&sub);
                if !d.is_zero() {
                    out.coeffs[j] = out.coeffs[j].clone() + c.clone() * d;
                }
            }
        }
        out
    }

    /// Coefficient of `dx^{1234567}` of a top-degree form.
    pub fn top_coeff(&self) -> T {
        if self.degree == DIM {
            self.coeffs[0].clone()
        } else {
            T::zero()
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> KForm<U> {
        KForm { degree: self.degree, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn to_real(&self) -> KForm<f64> {
        self.map(|c| c.to_f64())
    }
}

/// Parses a 1-based digit label like `"257"` into 0-based axes.
pub fn parse_label(label: &str) -> Result<Vec<usize>, FormError> {
    let trimmed = label.trim();
    let parts: Vec<&str> = if trimmed.contains(',') {
        trimmed.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    } else {
        trimmed.split("").filter(|s| !s.is_empty()).collect()
    };
    parts
        .into_iter()
        .map(|p| match p.parse::<usize>() {
            Ok(n) if (1..=DIM).contains(&n) => Ok(n - 1),
            _ => Err(FormError::BadIndex(label.to_string())),
        })
        .collect()
}

/// The standard G2 3-form
/// `φ0 = dx123 + dx145 + dx167 + dx246 − dx257 − dx347 − dx356`.
pub fn standard_phi0<T: Scalar>() -> KForm<T> {
    KForm::from_terms(
        3,
        &[("123", 1), ("145", 1), ("167", 1), ("246", 1), ("257", -1), ("347", -1), ("356", -1)],
    )
    .expect("static terms")
}

/// Euclidean volume form `dx^{1234567}`.
pub fn euclidean_volume<T: Scalar>() -> KForm<T> {
    KForm::from_coeffs(DIM, vec![T::one()]).expect("single slot")
}
