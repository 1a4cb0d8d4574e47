use std::sync::OnceLock;

use crate::linalg;
use crate::scalar::Scalar;

use super::kform::{mask_axes, mask_index, masks, merge_sign, KForm, DIM};
use super::FormError;

/// Riemannian metric on R^7 with its volume factor and orientation sign.
///
/// `volume` is `sqrt(det g)`; the metric volume form is
/// `orientation · volume · dx^{1234567}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor<T: Scalar> {
    pub entries: Vec<Vec<T>>,
    pub volume: T,
    pub orientation: i32,
}

impl<T: Scalar> MetricTensor<T> {
    pub fn euclidean() -> Self {
        MetricTensor { entries: linalg::identity(DIM), volume: T::one(), orientation: 1 }
    }

    /// Builds a metric from a symmetric positive-definite matrix. In the exact
    /// domain `det g` must be a rational square.
    pub fn from_entries(entries: Vec<Vec<T>>, orientation: i32) -> Result<Self, FormError> {
        if entries.len() != DIM || entries.iter().any(|r| r.len() != DIM) {
            return Err(FormError::Shape);
        }
        for i in 0..DIM {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(FormError::NotSymmetric);
                }
            }
        }
        if !T::positive_definite(&entries) {
            return Err(FormError::NotPositive);
        }
        let volume = linalg::det(&entries).root(2).ok_or(FormError::NotRepresentable)?;
        Ok(MetricTensor { entries, volume, orientation: if orientation < 0 { -1 } else { 1 } })
    }

    pub fn inverse(&self) -> Vec<Vec<T>> {
        linalg::inverse(&self.entries).expect("metric is definite")
    }

    pub fn volume_form(&self) -> KForm<T> {
        let v = if self.orientation < 0 { -self.volume.clone() } else { self.volume.clone() };
        KForm::from_coeffs(DIM, vec![v]).expect("single slot")
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.orientation == other.orientation
            && (self.volume.to_f64() - other.volume.to_f64()).abs() <= tol
            && self
                .entries
                .iter()
                .flatten()
                .zip(other.entries.iter().flatten())
                .all(|(a, b)| (a.to_f64() - b.to_f64()).abs() <= tol)
    }
}

type BTerm = (u8, u8, u8, i8);

/// For each ordered pair (i, j), the monomial triples contributing to the
/// top coefficient of `(e_i⌟φ)∧(e_j⌟φ)∧φ`.
fn b_terms() -> &'static Vec<Vec<BTerm>> {
    static T: OnceLock<Vec<Vec<BTerm>>> = OnceLock::new();
    T.get_or_init(|| {
        let threes = masks(3);
        let full: u8 = 0x7f;
        let mut out = vec![Vec::new(); DIM * DIM];
        let contract_sign = |m: u8, axis: usize| -> i32 {
            let pos = mask_axes(m).iter().position(|&a| a == axis).unwrap();
            if pos % 2 == 0 {
                1
            } else {
                -1
            }
        };
        for i in 0..DIM {
            for j in 0..DIM {
                for (p, &mp) in threes.iter().enumerate() {
                    if mp & (1 << i) == 0 {
                        continue;
                    }
                    let a = mp & !(1 << i);
                    for (q, &mq) in threes.iter().enumerate() {
                        if mq & (1 << j) == 0 {
                            continue;
                        }
                        let b = mq & !(1 << j);
                        if a & b != 0 {
                            continue;
                        }
                        let r_mask = full & !(a | b);
                        let r = mask_index(r_mask);
                        let sign = contract_sign(mp, i)
                            * contract_sign(mq, j)
                            * merge_sign(a, b)
                            * merge_sign(a | b, r_mask);
                        out[i * DIM + j].push((p as u8, q as u8, r as u8, sign as i8));
                    }
                }
            }
        }
        out
    })
}

/// The symmetric bilinear form `B_ij = (1/6)[(e_i⌟φ)∧(e_j⌟φ)∧φ]_{1..7}`.
pub fn b_matrix<T: Scalar>(phi: &KForm<T>) -> Result<Vec<Vec<T>>, FormError> {
    if phi.degree() != 3 {
        return Err(FormError::DegreeMismatch(3, phi.degree()));
    }
    let c = phi.coeffs();
    let six = T::from_i64(6);
    let terms = b_terms();
    let mut b = vec![vec![T::zero(); DIM]; DIM];
    for i in 0..DIM {
        for j in i..DIM {
            let mut acc = T::zero();
            for &(p, q, r, s) in &terms[i * DIM + j] {
                let (cp, cq, cr) = (&c[p as usize], &c[q as usize], &c[r as usize]);
                if cp.is_zero() || cq.is_zero() || cr.is_zero() {
                    continue;
                }
                let t = cp.clone() * cq.clone() * cr.clone();
                acc = if s > 0 { acc + t } else { acc - t };
            }
            let v = acc / six.clone();
            b[i][j] = v.clone();
            b[j][i] = v;
        }
    }
    Ok(b)
}

/// Recovers `(g, vol)` from a positive 3-form: with `r = det(B)^{1/9}`,
/// `g = B / r` and `vol = |r|`; the orientation is the sign of `det B`.
pub fn metric_from_three_form<T: Scalar>(phi: &KForm<T>) -> Result<MetricTensor<T>, FormError> {
    let b = b_matrix(phi)?;
    let det = linalg::det(&b);
    let orientation = det.sign();
    if orientation == 0 {
        return Err(FormError::NotPositive);
    }
    let signed: Vec<Vec<T>> =
        if orientation > 0 { b.clone() } else { b.iter().map(|r| r.iter().map(|x| -x.clone()).collect()).collect() };
    if !T::positive_definite(&signed) {
        return Err(FormError::NotPositive);
    }
    let r = det.root(9).ok_or(FormError::NotRepresentable)?;
    let entries: Vec<Vec<T>> = b.iter().map(|row| row.iter().map(|x| x.clone() / r.clone()).collect()).collect();
    let volume = if r.sign() < 0 { -r } else { r };
    Ok(MetricTensor { entries, volume, orientation })
}

/// Positivity of a 3-form: `B` is definite. Does not require the ninth
/// root to be representable, so it is exact for every rational input.
pub fn is_positive<T: Scalar>(phi: &KForm<T>) -> bool {
    let Ok(b) = b_matrix(phi) else {
        return false;
    };
    let det = linalg::det(&b);
    match det.sign() {
        0 => false,
        1 => T::positive_definite(&b),
        _ => {
            let neg: Vec<Vec<T>> = b.iter().map(|r| r.iter().map(|x| -x.clone()).collect()).collect();
            T::positive_definite(&neg)
        }
    }
}

/// Hodge star: `*dx^I = orient · vol · Σ_K det(g⁻¹[K,I]) · sign(K,K^c) dx^{K^c}`.
pub fn hodge_star<T: Scalar>(g: &MetricTensor<T>, a: &KForm<T>) -> KForm<T> {
    let k = a.degree();
    let ginv = g.inverse();
    let factor = if g.orientation < 0 { -g.volume.clone() } else { g.volume.clone() };
    let full: u8 = 0x7f;
    let mut coeffs = vec![T::zero(); KForm::<T>::zero(DIM - k).coeffs().len()];
    let ms = masks(k);
    for (i, c) in a.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cols = mask_axes(ms[i]);
        for &mk in ms {
            let rows = mask_axes(mk);
            let sub: Vec<Vec<T>> =
                rows.iter().map(|&r| cols.iter().map(|&cc| ginv[r][cc].clone()).collect()).collect();
            let d = linalg::det(&sub);
            if d.is_zero() {
                continue;
            }
            let comp = full & !mk;
            let t = c.clone() * d * factor.clone();
            let slot = &mut coeffs[mask_index(comp)];
            *slot = if merge_sign(mk, comp) > 0 { slot.clone() + t } else { slot.clone() - t };
        }
    }
    KForm::from_coeffs(DIM - k, coeffs).expect("complement degree")
}
