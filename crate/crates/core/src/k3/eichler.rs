use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{checked_dot, content, k3_lattice, unit, IntegerLattice, Isometry, LatticeError, Vector};

/// Budget and seed for the randomized fallback searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: 20_000, seed: 0 }
    }
}

/// Eichler transvection `E_{e,a}(x) = x + (x·e) a − (x·a) e − ½ (a·a)(x·e) e`
/// for isotropic `e` and `a ⟂ e`; an integral isometry of an even lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transvection {
    e: Vector,
    a: Vector,
    ge: Vector,
    ga: Vector,
    half_a2: i64,
}

impl Transvection {
    pub fn new(lat: &IntegerLattice, e: Vector, a: Vector) -> Result<Self, LatticeError> {
        let ge = lat.gram_apply(&e)?;
        let ga = lat.gram_apply(&a)?;
        let a2 = checked_dot(&a, &ga)?;
        if checked_dot(&e, &ge)? != 0 || checked_dot(&a, &ge)? != 0 || a2 % 2 != 0 {
            return Err(LatticeError::NotIsometry);
        }
        Ok(Transvection { e, a, ge, ga, half_a2: a2 / 2 })
    }

    pub fn apply(&self, x: &[i64]) -> Result<Vector, LatticeError> {
        let xe = checked_dot(x, &self.ge)?;
        let xa = checked_dot(x, &self.ga)?;
        let coef_e = xa
            .checked_add(self.half_a2.checked_mul(xe).ok_or(LatticeError::Overflow)?)
            .ok_or(LatticeError::Overflow)?;
        x.iter()
            .zip(self.a.iter().zip(&self.e))
            .map(|(&xi, (&ai, &ei))| {
                let t = (xe as i128) * (ai as i128) - (coef_e as i128) * (ei as i128);
                i64::try_from(xi as i128 + t).map_err(|_| LatticeError::Overflow)
            })
            .collect()
    }
}

/// Hyperbolic planes found in the basis: index pairs `(e, f)` with
/// `e² = f² = 0`, `e·f = 1`, orthogonal to every other basis vector.
pub(crate) fn hyperbolic_planes(lat: &IntegerLattice) -> Vec<(usize, usize)> {
    let g = lat.gram();
    let n = lat.rank();
    let isolated = |i: usize, j: usize| (0..n).all(|k| k == i || k == j || (g[i][k] == 0 && g[j][k] == 0));
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < n {
        if g[i][i] == 0 && g[i + 1][i + 1] == 0 && g[i][i + 1] == 1 && isolated(i, i + 1) {
            out.push((i, i + 1));
            i += 2;
        } else {
            i += 1;
        }
    }
    out
}

/// Tracks a running isometry (by the images of basis vectors) and a set of
/// vectors transformed along with it.
pub(crate) struct Reducer<'a> {
    pub lat: &'a IntegerLattice,
    pub cols: Vec<Vector>,
    pub tracked: Vec<Vector>,
    pub steps: usize,
}

const MAX_STEPS: usize = 100_000;

impl<'a> Reducer<'a> {
    pub fn new(lat: &'a IntegerLattice, tracked: Vec<Vector>) -> Self {
        let n = lat.rank();
        Reducer { lat, cols: (0..n).map(|i| unit(n, i)).collect(), tracked, steps: 0 }
    }

    pub fn apply(&mut self, t: &Transvection) -> Result<(), LatticeError> {
        self.steps += 1;
        if self.steps > MAX_STEPS {
            return Err(LatticeError::NotFound { budget: MAX_STEPS });
        }
        for c in self.cols.iter_mut().chain(self.tracked.iter_mut()) {
            *c = t.apply(c)?;
        }
        Ok(())
    }

    /// Negates the coordinates of one hyperbolic plane.
    pub fn negate_plane(&mut self, p: (usize, usize)) {
        for c in self.cols.iter_mut().chain(self.tracked.iter_mut()) {
            c[p.0] = -c[p.0];
            c[p.1] = -c[p.1];
        }
    }

    pub fn transvect(&mut self, e: Vector, a: Vector) -> Result<(), LatticeError> {
        let t = Transvection::new(self.lat, e, a)?;
        self.apply(&t)
    }

    pub fn isometry(&self) -> Isometry {
        Isometry::from_columns_unchecked(&self.cols)
    }

    fn basis(&self, i: usize, k: i64) -> Vector {
        let mut v = vec![0; self.lat.rank()];
        v[i] = k;
        v
    }

    /// Reads `X = [[a, c], [−d, b]]` from the coordinates of vector `idx` on
    /// the planes `p0 = (e1, f1)`, `p1 = (e2, f2)`.
    fn read_x(&self, idx: usize, p0: (usize, usize), p1: (usize, usize)) -> [[i64; 2]; 2] {
        let v = &self.tracked[idx];
        [[v[p0.0], v[p1.0]], [-v[p1.1], v[p0.1]]]
    }

    fn row1_add_row2(&mut self, k: i64, p0: (usize, usize), p1: (usize, usize)) -> Result<(), LatticeError> {
        self.transvect(self.basis(p0.0, 1), self.basis(p1.0, k))
    }

    fn row2_add_row1(&mut self, k: i64, p0: (usize, usize), p1: (usize, usize)) -> Result<(), LatticeError> {
        self.transvect(self.basis(p0.1, 1), self.basis(p1.1, -k))
    }

    fn col2_add_col1(&mut self, k: i64, p0: (usize, usize), p1: (usize, usize)) -> Result<(), LatticeError> {
        self.transvect(self.basis(p0.1, 1), self.basis(p1.0, k))
    }

    fn col1_add_col2(&mut self, k: i64, p0: (usize, usize), p1: (usize, usize)) -> Result<(), LatticeError> {
        self.transvect(self.basis(p0.0, 1), self.basis(p1.1, -k))
    }

    /// Brings `X` to `diag(g, m)` with `g | m` by elementary operations.
    fn smith(&mut self, idx: usize, p0: (usize, usize), p1: (usize, usize)) -> Result<(), LatticeError> {
        for _ in 0..10_000 {
            let x = self.read_x(idx, p0, p1);
            if x.iter().flatten().all(|&v| v == 0) {
                return Ok(());
            }
            if x[0][1] == 0 && x[1][0] == 0 && x[0][0] != 0 && x[1][1] % x[0][0] == 0 {
                return Ok(());
            }
            let (mut pr, mut pc) = (0, 0);
            let mut best = i64::MAX;
            for r in 0..2 {
                for c in 0..2 {
                    if x[r][c] != 0 && x[r][c].abs() < best {
                        best = x[r][c].abs();
                        (pr, pc) = (r, c);
                    }
                }
            }
            if pr == 1 {
                self.row1_add_row2(1, p0, p1)?;
                self.row2_add_row1(-1, p0, p1)?;
                self.row1_add_row2(1, p0, p1)?;
            }
            if pc == 1 {
                self.col1_add_col2(1, p0, p1)?;
                self.col2_add_col1(-1, p0, p1)?;
                self.col1_add_col2(1, p0, p1)?;
            }
            let x = self.read_x(idx, p0, p1);
            let p = x[0][0];
            if x[1][0] / p != 0 {
                self.row2_add_row1(-(x[1][0] / p), p0, p1)?;
            }
            if x[0][1] / p != 0 {
                self.col2_add_col1(-(x[0][1] / p), p0, p1)?;
            }
            let x = self.read_x(idx, p0, p1);
            if x[0][1] == 0 && x[1][0] == 0 && x[1][1] % x[0][0] != 0 {
                self.row1_add_row2(1, p0, p1)?;
            }
        }
        Err(LatticeError::NotFound { budget: 10_000 })
    }

    /// Moves tracked vector `idx` to `g e1 + m f1` using transvections built
    /// from the planes `p0, p1` and the sublattice on `rest` (which must be
    /// orthogonal to both planes). Coordinates outside these are untouched.
    /// Returns false when the rest part cannot be absorbed.
    pub fn reduce(&mut self, idx: usize, p0: (usize, usize), p1: (usize, usize), rest: &[usize]) -> Result<bool, LatticeError> {
        self.smith(idx, p0, p1)?;
        let n = self.lat.rank();
        let restrict = |v: &Vector| -> Vector {
            let mut r = vec![0; n];
            for &k in rest {
                r[k] = v[k];
            }
            r
        };
        let r = restrict(&self.tracked[idx]);
        if r.iter().any(|&x| x != 0) {
            let gr = restrict(&self.lat.gram_apply(&r)?);
            let (delta, coeffs) = vector_ext_gcd(&gr);
            if delta == 0 {
                return Ok(false);
            }
            // r·x = −δ raises the e2-coefficient by δ.
            let x: Vector = coeffs.iter().map(|c| -c).collect();
            if self.transvect(self.basis(p1.0, 1), x).is_err() {
                return Ok(false);
            }
            self.smith(idx, p0, p1)?;
        }
        let x = self.read_x(idx, p0, p1);
        if x[0][0] < 0 {
            self.negate_plane(p0);
        }
        let g = self.tracked[idx][p0.0];
        let r = restrict(&self.tracked[idx]);
        if r.iter().any(|&x| x != 0) {
            if g == 0 || r.iter().any(|&x| x % g != 0) {
                return Ok(false);
            }
            let u: Vector = r.iter().map(|&x| -x / g).collect();
            self.transvect(self.basis(p0.1, 1), u)?;
        }
        let v = &self.tracked[idx];
        Ok(v[p1.0] == 0 && v[p1.1] == 0 && rest.iter().all(|&k| v[k] == 0))
    }
}

/// `(gcd(y), s)` with `s · y = gcd(y) ≥ 0`.
fn vector_ext_gcd(y: &[i64]) -> (i64, Vector) {
    let mut g = 0i64;
    let mut s = vec![0i64; y.len()];
    for (k, &yk) in y.iter().enumerate() {
        if yk == 0 {
            continue;
        }
        let e = g.extended_gcd(&yk);
        for c in s.iter_mut() {
            *c *= e.x;
        }
        s[k] = e.y;
        g = e.gcd;
    }
    if g < 0 {
        g = -g;
        s.iter_mut().for_each(|c| *c = -*c);
    }
    (g, s)
}

/// The 384 isometries permuting the three hyperbolic blocks of the K3
/// lattice, swapping `e ↔ f` and negating within blocks; identity on `−E8`s.
pub fn hyperbolic_block_group() -> Vec<Isometry> {
    let n = super::K3_RANK;
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(384);
    for perm in perms {
        for swaps in 0..8u8 {
            for signs in 0..8u8 {
                let mut cols: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
                for b in 0..3 {
                    let target = perm[b];
                    let sign = if signs & (1 << b) != 0 { -1 } else { 1 };
                    let swap = swaps & (1 << b) != 0;
                    let (ie, i_f) = (2 * target, 2 * target + 1);
                    let (te, tf) = if swap { (i_f, ie) } else { (ie, i_f) };
                    cols[2 * b] = { let mut v = vec![0; n]; v[te] = sign; v };
                    cols[2 * b + 1] = { let mut v = vec![0; n]; v[tf] = sign; v };
                }
                out.push(Isometry::from_columns_unchecked(&cols));
            }
        }
    }
    out
}

/// Canonicalizing isometry for a primitive vector using the first two
/// hyperbolic planes of the basis, if the lattice has them.
pub(crate) fn canonicalize(lat: &IntegerLattice, v: &[i64]) -> Result<Option<(Isometry, Vector)>, LatticeError> {
    let planes = hyperbolic_planes(lat);
    if planes.len() < 2 {
        return Ok(None);
    }
    let (p0, p1) = (planes[0], planes[1]);
    let rest: Vec<usize> = (0..lat.rank()).filter(|&k| ![p0.0, p0.1, p1.0, p1.1].contains(&k)).collect();
    let mut red = Reducer::new(lat, vec![v.to_vec()]);
    if !red.reduce(0, p0, p1, &rest)? {
        return Ok(None);
    }
    let image = red.tracked[0].clone();
    Ok(Some((red.isometry(), image)))
}

pub fn find_isometry(lat: &IntegerLattice, v: &[i64], w: &[i64]) -> Result<Isometry, LatticeError> {
    find_isometry_with(lat, v, w, SearchConfig::default())
}

/// Finds an isometry `M` with `M v = w`: block symmetries first, then
/// Eichler reduction of both vectors to a common normal form, then a
/// bounded random walk of reflections.
pub fn find_isometry_with(lat: &IntegerLattice, v: &[i64], w: &[i64], cfg: SearchConfig) -> Result<Isometry, LatticeError> {
    if !lat.is_primitive(v)? || !lat.is_primitive(w)? {
        return Err(LatticeError::NotPrimitive);
    }
    let (sv, sw) = (lat.square(v)?, lat.square(w)?);
    if sv != sw {
        return Err(LatticeError::SquareMismatch(sv.to_string(), sw.to_string()));
    }
    let (dv, dw) = (lat.divisor(v)?, lat.divisor(w)?);
    if dv != dw {
        return Err(LatticeError::DivisorMismatch(dv, dw));
    }
    if v == w {
        return Ok(Isometry::identity(lat.rank()));
    }
    if *lat == k3_lattice() {
        for m in hyperbolic_block_group() {
            if m.apply(v)? == w {
                return Ok(m);
            }
        }
    }
    if let (Some((mv, cv)), Some((mw, cw))) = (canonicalize(lat, v)?, canonicalize(lat, w)?) {
        if cv == cw {
            let m = mw.inverse(lat)?.compose(&mv)?;
            let m = Isometry::new(lat, m.matrix().to_vec())?;
            if m.apply(v)? == w {
                return Ok(m);
            }
        }
    }
    reflection_search(lat, v, w, cfg)
}

/// Seeded pairs of primitive vectors of equal square `|v²| ≤ max_square`,
/// supported in the three hyperbolic blocks of the K3 lattice.
pub fn random_block_pairs(count: usize, max_square: i64, seed: u64) -> Vec<(Vector, Vector)> {
    let lat = k3_lattice();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let mut v = vec![0i64; super::K3_RANK];
        for x in v.iter_mut().take(6) {
            *x = rng.gen_range(-4..=4);
        }
        if content(&v) == 1 {
            let s = lat.square(&v).expect("small entries");
            if s.abs() <= max_square {
                return (v, s);
            }
        }
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (v, s) = draw(&mut rng);
        let w = loop {
            let (w, t) = draw(&mut rng);
            if t == s {
                break w;
            }
        };
        out.push((v, w));
    }
    out
}

fn reflection_search(lat: &IntegerLattice, v: &[i64], w: &[i64], cfg: SearchConfig) -> Result<Isometry, LatticeError> {
    let n = lat.rank();
    let mut roots: Vec<(Vector, i64)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            for sign in [1, -1] {
                let mut u = unit(n, i);
                if j != i {
                    u[j] += sign;
                } else if sign < 0 {
                    continue;
                }
                let s = lat.square(&u)?;
                if matches!(s, 1 | -1 | 2 | -2) {
                    roots.push((u, s));
                }
            }
        }
    }
    if roots.is_empty() {
        return Err(LatticeError::NotFound { budget: cfg.budget });
    }
    let reflect = |x: &Vector, u: &Vector, s: i64| -> Result<Vector, LatticeError> {
        let k = 2 * lat.dot(x, u)? / s;
        Ok(x.iter().zip(u).map(|(a, b)| a - k * b).collect())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cur = v.to_vec();
    let mut cols: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
    for _ in 0..cfg.budget {
        let (u, s) = &roots[rng.gen_range(0..roots.len())];
        cur = reflect(&cur, u, *s)?;
        for c in cols.iter_mut() {
            *c = reflect(c, u, *s)?;
        }
        if cur == w {
            return Isometry::new(lat, Isometry::from_columns_unchecked(&cols).matrix().to_vec());
        }
        if content(&cur).abs() > 1_000_000 || cur.iter().any(|x| x.abs() > 1_000_000) {
            cur = v.to_vec();
            cols = (0..n).map(|i| unit(n, i)).collect();
        }
    }
    Err(LatticeError::NotFound { budget: cfg.budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::k3::{add_scaled, e, f};

    #[test]
    fn transvection_is_isometry() {
        let l = k3_lattice();
        let mut a = vec![0; 22];
        a[6] = 1;
        a[7] = 2;
        let t = Transvection::new(&l, e(3), a).unwrap();
        let cols: Vec<Vector> = (0..22).map(|i| t.apply(&unit(22, i)).unwrap()).collect();
        assert!(Isometry::new(&l, Isometry::from_columns_unchecked(&cols).matrix().to_vec()).is_ok());
        assert!(Transvection::new(&l, add_scaled(&e(1), 1, &f(1)), e(2)).is_err());
    }

    #[test]
    fn reduce_reaches_normal_form() {
        let l = k3_lattice();
        let mut v = vec![0i64; 22];
        v[0] = 6;
        v[1] = -4;
        v[2] = 9;
        v[3] = 15;
        v[4] = 2;
        v[9] = 3;
        v[17] = -5;
        let n = l.square(&v).unwrap() / 2;
        let (m, c) = canonicalize(&l, &v).unwrap().unwrap();
        assert_eq!(c, add_scaled(&e(1), n, &f(1)));
        assert_eq!(m.apply(&v).unwrap(), c);
        assert!(Isometry::new(&l, m.matrix().to_vec()).is_ok());
    }

    #[test]
    fn block_group_has_384_isometries() {
        let l = k3_lattice();
        let g = hyperbolic_block_group();
        assert_eq!(g.len(), 384);
        for m in g.iter().step_by(37) {
            assert!(Isometry::new(&l, m.matrix().to_vec()).is_ok());
        }
    }

    #[test]
    fn ext_gcd() {
        let (g, s) = vector_ext_gcd(&[6, -10, 15]);
        assert_eq!(g, 1);
        assert_eq!(6 * s[0] - 10 * s[1] + 15 * s[2], 1);
    }
}
