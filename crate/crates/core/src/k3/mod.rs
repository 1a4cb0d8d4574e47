//! Integer lattices, the K3 lattice `3H ⊕ 2(−E8)`, isometry search by
//! Eichler transvections, and Donaldson matching of Kähler class triples.
//!
//! Basis of the K3 lattice (0-based): `e1, f1, e2, f2, e3, f3` at 0..5 with
//! `e_i · f_i = 1`, then two copies of the negated E8 Cartan matrix at 6..13
//! and 14..21, each in Bourbaki node order.

mod eichler;
mod matching;

pub use eichler::{find_isometry, find_isometry_with, hyperbolic_block_group, random_block_pairs, SearchConfig, Transvection};
pub use matching::{donaldson_match, donaldson_match_with, rank_one_example, matching_feasible_rank, HyperKahlerClasses, MatchWitness, Polarization};

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::linalg;
use crate::scalar::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("gram matrix is not square and symmetric")]
    NotSymmetric,
    #[error("gram matrix is degenerate")]
    Degenerate,
    #[error("vector has length {got}, lattice rank is {rank}")]
    Length { got: usize, rank: usize },
    #[error("zero vector has no primitivity")]
    ZeroVector,
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("squares differ: {0} vs {1}")]
    SquareMismatch(String, String),
    #[error("divisors differ: {0} vs {1}")]
    DivisorMismatch(i64, i64),
    #[error("integer overflow")]
    Overflow,
    #[error("matrix is not an isometry of the lattice")]
    NotIsometry,
    #[error("invalid hyper-Kähler classes: {0}")]
    InvalidClasses(String),
    #[error("no isometry found within a budget of {budget} steps")]
    NotFound { budget: usize },
    #[error("matching is impossible: {0}")]
    Infeasible(String),
    #[error("malformed lattice file: {0}")]
    Json(String),
}

pub type Vector = Vec<i64>;

pub(crate) fn checked_dot(a: &[i64], b: &[i64]) -> Result<i64, LatticeError> {
    let s: i128 = a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum();
    i64::try_from(s).map_err(|_| LatticeError::Overflow)
}

pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// A nondegenerate symmetric bilinear form on `Z^rank`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    gram: Vec<Vec<i64>>,
}

impl IntegerLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotSymmetric);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        let lat = IntegerLattice { gram };
        if lat.determinant_rational().is_zero() {
            return Err(LatticeError::Degenerate);
        }
        Ok(lat)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    fn check_len(&self, v: &[i64]) -> Result<(), LatticeError> {
        if v.len() != self.rank() {
            return Err(LatticeError::Length { got: v.len(), rank: self.rank() });
        }
        Ok(())
    }

    /// `G v`.
    pub fn gram_apply(&self, v: &[i64]) -> Result<Vector, LatticeError> {
        self.check_len(v)?;
        self.gram.iter().map(|row| checked_dot(row, v)).collect()
    }

    pub fn dot(&self, u: &[i64], v: &[i64]) -> Result<i64, LatticeError> {
        self.check_len(u)?;
        checked_dot(u, &self.gram_apply(v)?)
    }

    pub fn square(&self, v: &[i64]) -> Result<i64, LatticeError> {
        self.dot(v, v)
    }

    pub fn dot_rational(&self, u: &[Rational], v: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for i in 0..self.rank() {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..self.rank() {
                if self.gram[i][j] != 0 && !v[j].is_zero() {
                    s += &u[i] * &v[j] * Rational::from_integer(self.gram[i][j].into());
                }
            }
        }
        s
    }

    fn rational_gram(&self) -> Vec<Vec<Rational>> {
        self.gram.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect()
    }

    fn determinant_rational(&self) -> Rational {
        linalg::det(&self.rational_gram())
    }

    pub fn determinant(&self) -> Result<i64, LatticeError> {
        self.determinant_rational().to_integer().to_i64().ok_or(LatticeError::Overflow)
    }

    /// `(positive, negative)` index of inertia.
    pub fn signature(&self) -> (usize, usize) {
        let (p, n, _) = linalg::inertia(&self.rational_gram());
        (p, n)
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[i][i] % 2 == 0)
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().map(|d| d.abs() == 1).unwrap_or(false)
    }

    /// `gcd(v · L)`, the positive generator of the ideal `v · L`.
    pub fn divisor(&self, v: &[i64]) -> Result<i64, LatticeError> {
        Ok(content(&self.gram_apply(v)?).abs())
    }

    pub fn is_primitive(&self, v: &[i64]) -> Result<bool, LatticeError> {
        self.check_len(v)?;
        is_primitive(v)
    }

    pub fn to_json(&self) -> Value {
        json!({ "gram": self.gram })
    }
}

/// Whether the coordinates of a nonzero vector are coprime.
pub fn is_primitive(v: &[i64]) -> Result<bool, LatticeError> {
    match content(v).abs() {
        0 => Err(LatticeError::ZeroVector),
        g => Ok(g == 1),
    }
}

/// Negated E8 Cartan matrix, Bourbaki numbering.
pub fn negative_e8() -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = -2;
    }
    for (a, b) in [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)] {
        m[a - 1][b - 1] = 1;
        m[b - 1][a - 1] = 1;
    }
    m
}

pub const K3_RANK: usize = 22;

/// The K3 lattice `3H ⊕ 2(−E8)`.
pub fn k3_lattice() -> IntegerLattice {
    let mut g = vec![vec![0i64; K3_RANK]; K3_RANK];
    for b in 0..3 {
        g[2 * b][2 * b + 1] = 1;
        g[2 * b + 1][2 * b] = 1;
    }
    let e8 = negative_e8();
    for off in [6, 14] {
        for i in 0..8 {
            for j in 0..8 {
                g[off + i][off + j] = e8[i][j];
            }
        }
    }
    IntegerLattice { gram: g }
}

/// Basis vector `e_block` (block 1..3) of the K3 lattice.
pub fn e(block: usize) -> Vector {
    unit(K3_RANK, 2 * (block - 1))
}

/// Basis vector `f_block` (block 1..3) of the K3 lattice.
pub fn f(block: usize) -> Vector {
    unit(K3_RANK, 2 * (block - 1) + 1)
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

pub fn add_scaled(u: &[i64], k: i64, v: &[i64]) -> Vector {
    u.iter().zip(v).map(|(a, b)| a + k * b).collect()
}

/// An integral isometry `M` (acting on column vectors), validated on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    matrix: Vec<Vec<i64>>,
}

impl Isometry {
    /// Checks `MᵀGM = G` and `det M = ±1` exactly.
    pub fn new(lat: &IntegerLattice, matrix: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = lat.rank();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotIsometry);
        }
        let cols: Vec<Vector> = (0..n).map(|j| matrix.iter().map(|r| r[j]).collect()).collect();
        for i in 0..n {
            for j in i..n {
                if lat.dot(&cols[i], &cols[j])? != lat.gram[i][j] {
                    return Err(LatticeError::NotIsometry);
                }
            }
        }
        let rm: Vec<Vec<Rational>> =
            matrix.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect();
        let d = linalg::det(&rm);
        if d != Rational::from_integer(1.into()) && d != Rational::from_integer((-1).into()) {
            return Err(LatticeError::NotIsometry);
        }
        Ok(Isometry { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Isometry { matrix: (0..n).map(|i| unit(n, i)).collect() }
    }

    pub(crate) fn from_columns_unchecked(cols: &[Vector]) -> Self {
        let n = cols.len();
        Isometry { matrix: (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect() }
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vector, LatticeError> {
        self.matrix.iter().map(|r| checked_dot(r, v)).collect()
    }

    pub fn apply_rational(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .map(|r| {
                r.iter().zip(v).fold(Rational::zero(), |acc, (&m, x)| {
                    if m == 0 {
                        acc
                    } else {
                        acc + x * Rational::from_integer(m.into())
                    }
                })
            })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry, LatticeError> {
        let n = self.matrix.len();
        let cols: Vec<Vector> = (0..n)
            .map(|j| {
                let c: Vector = other.matrix.iter().map(|r| r[j]).collect();
                self.apply(&c)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self::from_columns_unchecked(&cols))
    }

    /// `M⁻¹ = G⁻¹ Mᵀ G`.
    pub fn inverse(&self, lat: &IntegerLattice) -> Result<Isometry, LatticeError> {
        let g = lat.rational_gram();
        let ginv = linalg::inverse(&g).ok_or(LatticeError::Degenerate)?;
        let mt: Vec<Vec<Rational>> = linalg::transpose(
            &self.matrix.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect::<Vec<_>>(),
        );
        let inv = linalg::matmul(&linalg::matmul(&ginv, &mt), &g);
        let matrix = inv
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| if x.is_integer() { x.to_integer().to_i64().ok_or(LatticeError::Overflow) } else { Err(LatticeError::NotIsometry) })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Ok(Isometry { matrix })
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == (i == j) as i64))
    }

    pub fn to_json(&self) -> Value {
        json!(self.matrix)
    }
}

pub fn rational_vector_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect())
}

pub fn rational_vector_from_json(v: &Value) -> Result<Vec<Rational>, LatticeError> {
    let arr = v.as_array().ok_or_else(|| LatticeError::Json("expected an array".into()))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| match x {
            Value::String(s) => parse_rational(s).map_err(|e| LatticeError::Json(format!("entry {i}: {e}"))),
            Value::Number(n) => n
                .as_i64()
                .map(|k| Rational::from_integer(k.into()))
                .ok_or_else(|| LatticeError::Json(format!("entry {i}: not an integer"))),
            _ => Err(LatticeError::Json(format!("entry {i}: expected a string"))),
        })
        .collect()
}

pub fn integer_vector_from_json(v: &Value) -> Result<Vector, LatticeError> {
    rational_vector_from_json(v)?
        .into_iter()
        .map(|x| {
            if x.is_integer() {
                x.to_integer().to_i64().ok_or(LatticeError::Overflow)
            } else {
                Err(LatticeError::Json("expected integral coordinates".into()))
            }
        })
        .collect()
}

/// Parses `{"gram": [[...]]}`, defaulting to the K3 lattice when absent.
pub fn lattice_from_json(v: &Value) -> Result<IntegerLattice, LatticeError> {
    match v.get("gram") {
        None => Ok(k3_lattice()),
        Some(g) => {
            let rows = g.as_array().ok_or_else(|| LatticeError::Json("gram must be an array".into()))?;
            let gram = rows
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| LatticeError::Json("gram rows must be arrays".into()))?
                        .iter()
                        .map(|x| x.as_i64().ok_or_else(|| LatticeError::Json("gram entries must be integers".into())))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            IntegerLattice::new(gram)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_invariants() {
        let l = k3_lattice();
        assert_eq!(l.rank(), 22);
        assert!(l.is_even());
        assert_eq!(l.determinant().unwrap(), -1);
        assert_eq!(l.signature(), (3, 19));
        let e8 = IntegerLattice::new(negative_e8()).unwrap();
        assert_eq!(e8.determinant().unwrap(), 1);
        assert_eq!(e8.signature(), (0, 8));
    }

    #[test]
    fn primitivity_examples() {
        let l = k3_lattice();
        let v = add_scaled(&e(1), 4, &f(1));
        assert!(l.is_primitive(&v).unwrap());
        assert_eq!(l.square(&v).unwrap(), 8);
        let w = add_scaled(&e(1), 3, &f(1));
        assert_eq!(l.square(&w).unwrap(), 6);
        let two: Vector = add_scaled(&e(1), 1, &f(1)).iter().map(|x| 2 * x).collect();
        assert!(!l.is_primitive(&two).unwrap());
        assert_eq!(l.is_primitive(&vec![0; 22]), Err(LatticeError::ZeroVector));
    }

    #[test]
    fn isometry_validation() {
        let l = k3_lattice();
        assert!(Isometry::new(&l, Isometry::identity(22).matrix).is_ok());
        let mut bad = Isometry::identity(22).matrix;
        bad[0][0] = 2;
        assert_eq!(Isometry::new(&l, bad), Err(LatticeError::NotIsometry));
        assert!(IntegerLattice::new(vec![vec![1, 1], vec![1, 1]]).is_err());
        assert!(IntegerLattice::new(vec![vec![0, 1], vec![2, 0]]).is_err());
    }
}
