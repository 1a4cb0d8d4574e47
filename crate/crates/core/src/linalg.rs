//! Small dense linear algebra over [`Scalar`] domains.
//!
//! Matrices are row-major `Vec<Vec<T>>`; sizes here never exceed 22.

use crate::scalar::{Rational, Scalar};
use num_traits::{Signed, Zero};

pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: Scalar>(n: usize) -> Matrix<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

pub fn transpose<T: Scalar>(m: &[Vec<T>]) -> Matrix<T> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn matmul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![T::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].clone() + a[i][l].clone() * b[l][j].clone();
            }
        }
    }
    out
}

fn pivot_row<T: Scalar>(m: &[Vec<T>], col: usize, from: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (r, row) in m.iter().enumerate().skip(from) {
        if row[col].is_zero() {
            continue;
        }
        let score = row[col].abs_f64();
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((r, score));
        }
    }
    best.map(|(r, _)| r)
}

/// Determinant by Gaussian elimination (closed forms below size 4).
pub fn det<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    match n {
        0 => return T::one(),
        1 => return m[0][0].clone(),
        2 => return m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        3 => {
            let c0 = m[1][1].clone() * m[2][2].clone() - m[1][2].clone() * m[2][1].clone();
            let c1 = m[1][0].clone() * m[2][2].clone() - m[1][2].clone() * m[2][0].clone();
            let c2 = m[1][0].clone() * m[2][1].clone() - m[1][1].clone() * m[2][0].clone();
            return m[0][0].clone() * c0 - m[0][1].clone() * c1 + m[0][2].clone() * c2;
        }
        _ => {}
    }
    let mut a = m.to_vec();
    let mut result = T::one();
    for col in 0..n {
        let Some(p) = pivot_row(&a, col, col) else {
            return T::zero();
        };
        if p != col {
            a.swap(p, col);
            result = -result;
        }
        let pivot = a[col][col].clone();
        result = result * pivot.clone();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / pivot.clone();
            for c in col..n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
    }
    result
}

/// Inverse by Gauss-Jordan; `None` when singular.
pub fn inverse<T: Scalar>(m: &[Vec<T>]) -> Option<Matrix<T>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut inv = identity::<T>(n);
    for col in 0..n {
        let p = pivot_row(&a, col, col)?;
        a.swap(p, col);
        inv.swap(p, col);
        let pivot = a[col][col].clone();
        for c in 0..n {
            a[col][c] = a[col][c].clone() / pivot.clone();
            inv[col][c] = inv[col][c].clone() / pivot.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
                let w = inv[col][c].clone() * f.clone();
                inv[r][c] = inv[r][c].clone() - w;
            }
        }
    }
    Some(inv)
}

/// Exact positive-definiteness via symmetric elimination: every pivot must
/// be strictly positive.
pub fn exact_positive_definite(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    let mut a = m.to_vec();
    for k in 0..n {
        if !a[k][k].is_positive() {
            return false;
        }
        let pivot = a[k][k].clone();
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone() / pivot.clone();
            for j in k..n {
                let v = a[k][j].clone() * f.clone();
                a[i][j] = a[i][j].clone() - v;
            }
        }
    }
    true
}

/// Inertia `(positive, negative, zero)` of a symmetric rational matrix,
/// computed by congruence diagonalization (Sylvester's law of inertia).
pub fn inertia(m: &[Vec<Rational>]) -> (usize, usize, usize) {
    let n = m.len();
    let mut a = m.to_vec();
    let mut diag = Vec::with_capacity(n);
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        let piv = remaining.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match piv {
            Some(p) => p,
            None => {
                let mut pair = None;
                'outer: for (x, &i) in remaining.iter().enumerate() {
                    for &j in remaining.iter().skip(x + 1) {
                        if !a[i][j].is_zero() {
                            pair = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                match pair {
                    None => {
                        diag.extend(std::iter::repeat(Rational::zero()).take(remaining.len()));
                        break;
                    }
                    Some((i, j)) => {
                        // Replace basis vector i by e_i + e_j: a_ii becomes 2 a_ij.
                        for k in 0..n {
                            let v = a[j][k].clone();
                            a[i][k] = a[i][k].clone() + v;
                        }
                        for k in 0..n {
                            let v = a[k][j].clone();
                            a[k][i] = a[k][i].clone() + v;
                        }
                        i
                    }
                }
            }
        };
        let pivot = a[p][p].clone();
        for &i in remaining.iter() {
            if i == p || a[i][p].is_zero() {
                continue;
            }
            let f = a[i][p].clone() / pivot.clone();
            for k in 0..n {
                let v = a[p][k].clone() * f.clone();
                a[i][k] = a[i][k].clone() - v;
            }
            for k in 0..n {
                let v = a[k][p].clone() * f.clone();
                a[k][i] = a[k][i].clone() - v;
            }
        }
        diag.push(pivot);
        remaining.retain(|&i| i != p);
    }
    let pos = diag.iter().filter(|d| d.is_positive()).count();
    let neg = diag.iter().filter(|d| d.is_negative()).count();
    (pos, neg, n - pos - neg)
}

/// Eigenvalues of a real symmetric matrix (cyclic Jacobi), ascending.
pub fn symmetric_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Integer basis of the rational null space of an integer matrix, each
/// vector scaled to coprime entries.
pub fn integer_null_space(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    use crate::scalar::rat;
    use num_integer::Integer;
    use num_traits::ToPrimitive;

    let mut a: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, row);
        let pv = a[row][col].clone();
        for c in 0..ncols {
            a[row][c] = a[row][c].clone() / pv.clone();
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..ncols {
                    let v = a[row][c].clone() * f.clone();
                    a[r][c] = a[r][c].clone() - v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = rat(1, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][f].clone();
            }
            let lcm = v.iter().fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
            let ints: Vec<num_bigint::BigInt> =
                v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
            let g = ints.iter().fold(num_bigint::BigInt::from(0), |acc, x| acc.gcd(x));
            ints.iter().map(|x| (x / &g).to_i64().expect("null space entry fits i64")).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn det_and_inverse_exact() {
        let m = vec![
            vec![rat(2, 1), rat(1, 1), rat(0, 1), rat(0, 1)],
            vec![rat(1, 1), rat(3, 1), rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(4, 1), rat(1, 1)],
            vec![rat(0, 1), rat(0, 1), rat(1, 1), rat(5, 1)],
        ];
        let d = det(&m);
        assert_eq!(d, rat(85, 1));
        let inv = inverse(&m).unwrap();
        assert_eq!(matmul(&m, &inv), identity::<Rational>(4));
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        let h = vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]];
        assert_eq!(inertia(&h), (1, 1, 0));
        let z = vec![vec![rat(0, 1); 2]; 2];
        assert_eq!(inertia(&z), (0, 0, 2));
    }

    #[test]
    fn jacobi_eigenvalues() {
        let m = vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 5.0]];
        let e = symmetric_eigenvalues(&m);
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12 && (e[2] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_is_integral() {
        let ns = integer_null_space(&[vec![1, 2, 3]], 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(v[0] + 2 * v[1] + 3 * v[2], 0);
        }
    }
}
