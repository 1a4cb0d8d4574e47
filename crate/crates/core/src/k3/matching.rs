use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::eichler::{hyperbolic_block_group, Reducer, SearchConfig, Transvection};
use super::{
    integer_vector_from_json, k3_lattice, lattice_from_json, rational_vector_from_json, rational_vector_to_json, unit,
    IntegerLattice, Isometry, LatticeError, Vector, K3_RANK,
};
use crate::linalg;
use crate::scalar::{format_rational, Rational};

/// Classes `[κ_I], [κ_J], [κ_K]` in K3 lattice coordinates over `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperKahlerClasses {
    pub ci: Vec<Rational>,
    pub cj: Vec<Rational>,
    pub ck: Vec<Rational>,
}

impl HyperKahlerClasses {
    pub fn new(ci: Vec<Rational>, cj: Vec<Rational>, ck: Vec<Rational>) -> Result<Self, LatticeError> {
        for v in [&ci, &cj, &ck] {
            if v.len() != K3_RANK {
                return Err(LatticeError::Length { got: v.len(), rank: K3_RANK });
            }
        }
        let c = HyperKahlerClasses { ci, cj, ck };
        let g = c.gram();
        if !(g[0][1].is_zero() && g[0][2].is_zero() && g[1][2].is_zero()) {
            return Err(LatticeError::InvalidClasses("classes are not pairwise orthogonal".into()));
        }
        if (0..3).any(|i| !g[i][i].is_positive()) {
            return Err(LatticeError::InvalidClasses("squares must be positive".into()));
        }
        if g[1][1] != g[2][2] {
            return Err(LatticeError::InvalidClasses("cJ and cK have different squares".into()));
        }
        Ok(c)
    }

    pub fn from_integers(ci: &[i64], cj: &[i64], ck: &[i64]) -> Result<Self, LatticeError> {
        let conv = |v: &[i64]| v.iter().map(|&x| Rational::from_integer(x.into())).collect();
        Self::new(conv(ci), conv(cj), conv(ck))
    }

    pub fn classes(&self) -> [&Vec<Rational>; 3] {
        [&self.ci, &self.cj, &self.ck]
    }

    /// Gram matrix of `(cI, cJ, cK)` in the K3 form.
    pub fn gram(&self) -> [[Rational; 3]; 3] {
        let l = k3_lattice();
        let v = self.classes();
        std::array::from_fn(|i| std::array::from_fn(|j| l.dot_rational(v[i], v[j])))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cI": rational_vector_to_json(&self.ci),
            "cJ": rational_vector_to_json(&self.cj),
            "cK": rational_vector_to_json(&self.ck),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, LatticeError> {
        let get = |k: &str| {
            v.get(k).ok_or_else(|| LatticeError::Json(format!("missing field {k}"))).and_then(rational_vector_from_json)
        };
        Self::new(get("cI")?, get("cJ")?, get("cK")?)
    }
}

/// A lattice `N` with a primitive embedding into the K3 lattice given by
/// the images of its basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarization {
    lattice: IntegerLattice,
    embedding: Vec<Vector>,
}

impl Polarization {
    pub fn new(lattice: IntegerLattice, embedding: Vec<Vector>) -> Result<Self, LatticeError> {
        let l = k3_lattice();
        if embedding.len() != lattice.rank() || lattice.rank() > K3_RANK {
            return Err(LatticeError::Length { got: embedding.len(), rank: lattice.rank() });
        }
        for (i, u) in embedding.iter().enumerate() {
            for (j, v) in embedding.iter().enumerate() {
                if l.dot(u, v)? != lattice.gram()[i][j] {
                    return Err(LatticeError::InvalidClasses("embedding does not preserve the gram matrix".into()));
                }
            }
        }
        Ok(Polarization { lattice, embedding })
    }

    /// Rank-one polarization generated by a single class.
    pub fn generated_by(v: Vector) -> Result<Self, LatticeError> {
        let s = k3_lattice().square(&v)?;
        Self::new(IntegerLattice::new(vec![vec![s]])?, vec![v])
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    pub fn embedding(&self) -> &[Vector] {
        &self.embedding
    }

    pub fn to_json(&self) -> Value {
        json!({ "gram": self.lattice.gram(), "embedding": self.embedding })
    }

    pub fn from_json(v: &Value) -> Result<Self, LatticeError> {
        let emb = v
            .get("embedding")
            .and_then(Value::as_array)
            .ok_or_else(|| LatticeError::Json("missing embedding".into()))?
            .iter()
            .map(integer_vector_from_json)
            .collect::<Result<Vec<_>, _>>()?;
        match v.get("gram") {
            Some(_) => Self::new(lattice_from_json(v)?, emb),
            None if emb.len() == 1 => Self::generated_by(emb.into_iter().next().unwrap_or_default()),
            None => Err(LatticeError::Json("missing gram".into())),
        }
    }
}

/// Whether the rank criterion guarantees a matching: both ranks at most 5.
/// Sufficient only; `false` means "not guaranteed".
pub fn matching_feasible_rank(n1: &Polarization, n2: &Polarization) -> bool {
    n1.rank() <= 5 && n2.rank() <= 5
}

/// A verified matching isometry together with the checked images.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchWitness {
    pub isometry: Isometry,
    pub images: [Vec<Rational>; 3],
    pub targets: [Vec<Rational>; 3],
}

impl MatchWitness {
    pub fn verified(&self) -> bool {
        self.images == self.targets && Isometry::new(&k3_lattice(), self.isometry.matrix().to_vec()).is_ok()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "isometry": self.isometry.to_json(),
            "images": self.images.iter().map(|v| rational_vector_to_json(v)).collect::<Vec<_>>(),
            "targets": self.targets.iter().map(|v| rational_vector_to_json(v)).collect::<Vec<_>>(),
            "verified": self.verified(),
        })
    }
}

/// Primitive integral direction and positive scale: `v = scale · prim`.
fn primitive_part(v: &[Rational]) -> Result<(Rational, Vector), LatticeError> {
    let den = v.iter().fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::from(0), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    let prim = ints.iter().map(|x| (x / &g).to_i64().ok_or(LatticeError::Overflow)).collect::<Result<Vec<_>, _>>()?;
    Ok((Rational::new(g, den), prim))
}

fn to_rational(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x.into())).collect()
}

fn neg(v: &[Rational]) -> Vec<Rational> {
    v.iter().map(|x| -x).collect()
}

/// Finds a K3 lattice isometry `h` with `h(c2.cI) = c1.cJ`, `h(c2.cJ) = c1.cI`
/// and `h(c2.cK) = −c1.cK`, verified exactly before it is returned.
pub fn donaldson_match(c1: &HyperKahlerClasses, c2: &HyperKahlerClasses) -> Result<MatchWitness, LatticeError> {
    donaldson_match_with(c1, c2, SearchConfig { budget: 4_000, seed: 0 })
}

pub fn donaldson_match_with(
    c1: &HyperKahlerClasses,
    c2: &HyperKahlerClasses,
    cfg: SearchConfig,
) -> Result<MatchWitness, LatticeError> {
    let lat = k3_lattice();
    let sources = [c2.ci.clone(), c2.cj.clone(), c2.ck.clone()];
    let targets = [c1.cj.clone(), c1.ci.clone(), neg(&c1.ck)];
    for i in 0..3 {
        for j in i..3 {
            let (a, b) = (lat.dot_rational(&sources[i], &sources[j]), lat.dot_rational(&targets[i], &targets[j]));
            if a != b {
                return Err(LatticeError::Infeasible(format!(
                    "inner product ({i},{j}) is {} on the source and {} on the target",
                    format_rational(&a),
                    format_rational(&b)
                )));
            }
        }
    }
    let mut sp = Vec::new();
    let mut tp = Vec::new();
    for k in 0..3 {
        let (ls, ps) = primitive_part(&sources[k])?;
        let (lt, pt) = primitive_part(&targets[k])?;
        if ls != lt {
            return Err(LatticeError::Infeasible(format!("class {k} has different divisibility on the two sides")));
        }
        if lat.divisor(&ps)? != lat.divisor(&pt)? {
            return Err(LatticeError::Infeasible(format!("class {k} has different divisors on the two sides")));
        }
        sp.push(ps);
        tp.push(pt);
    }
    let finish = |m: Isometry| -> Result<MatchWitness, LatticeError> {
        let m = Isometry::new(&lat, m.matrix().to_vec())?;
        let images: [Vec<Rational>; 3] = std::array::from_fn(|k| m.apply_rational(&sources[k]));
        let w = MatchWitness { isometry: m, images, targets: targets.clone() };
        if w.images == w.targets {
            Ok(w)
        } else {
            Err(LatticeError::NotFound { budget: cfg.budget })
        }
    };
    for m in small_symmetries() {
        if (0..3).all(|k| m.apply(&sp[k]).map(|v| v == tp[k]).unwrap_or(false)) {
            return finish(m);
        }
    }
    let (rs, sp) = size_reduce(&lat, &sp)?;
    let (rt, tp) = size_reduce(&lat, &tp)?;
    for order in [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 0, 1], [1, 2, 0], [2, 1, 0]] {
        let pick = |v: &[Vector]| order.iter().map(|&k| v[k].clone()).collect::<Vec<_>>();
        if let Some(h) = match_in_order(&lat, &pick(&sp), &pick(&tp), cfg)? {
            return finish(rt.inverse(&lat)?.compose(&h.compose(&rs)?)?);
        }
    }
    Err(LatticeError::NotFound { budget: cfg.budget })
}

/// Greedy descent of the total L1 size of `v` under the transvections
/// `E_{u, ±x}` with `u ∈ {e_b, f_b}` and `x` a basis vector outside block `b`.
fn size_reduce(lat: &IntegerLattice, v: &[Vector]) -> Result<(Isometry, Vec<Vector>), LatticeError> {
    let n = K3_RANK;
    let mut moves = Vec::new();
    for b in 0..3 {
        for iso in [2 * b, 2 * b + 1] {
            for k in (0..n).filter(|&k| k / 2 != b || k >= 6) {
                for s in [1, -1] {
                    let mut x = vec![0; n];
                    x[k] = s;
                    moves.push(Transvection::new(lat, unit(n, iso), x)?);
                }
            }
        }
    }
    let size = |w: &[Vector]| w.iter().flatten().map(|x| x.unsigned_abs()).sum::<u64>();
    let mut red = Reducer::new(lat, v.to_vec());
    loop {
        let cur = size(&red.tracked);
        let mut best: Option<(u64, usize)> = None;
        for (i, t) in moves.iter().enumerate() {
            let img = red.tracked.iter().map(|w| t.apply(w)).collect::<Result<Vec<_>, _>>()?;
            let sz = size(&img);
            if sz < cur && best.map_or(true, |(b, _)| sz < b) {
                best = Some((sz, i));
            }
        }
        match best {
            Some((_, i)) => red.apply(&moves[i])?,
            None => return Ok((red.isometry(), red.tracked.clone())),
        }
    }
}

/// Normal forms of both triples with the given class order; `None` when
/// they differ or a search runs out of budget.
fn match_in_order(lat: &IntegerLattice, sp: &[Vector], tp: &[Vector], cfg: SearchConfig) -> Result<Option<Isometry>, LatticeError> {
    let normal = |v: &[Vector]| -> Result<Option<(Isometry, Vec<Vector>)>, LatticeError> {
        let (m, c) = match canonical_pair(lat, v) {
            Ok(x) => x,
            Err(LatticeError::NotFound { .. } | LatticeError::Overflow) => return Ok(None),
            Err(e) => return Err(e),
        };
        match third_normal_form(lat, &c, cfg) {
            Ok((n, z)) => Ok(Some((n.compose(&m)?, vec![c[0].clone(), c[1].clone(), z]))),
            Err(LatticeError::NotFound { .. } | LatticeError::Overflow) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let (Some((ms, cs)), Some((mt, ct))) = (normal(sp)?, normal(tp)?) else {
        return Ok(None);
    };
    if cs != ct {
        return Ok(None);
    }
    Ok(Some(mt.inverse(lat)?.compose(&ms)?))
}

/// Block symmetries of `3H` combined with signs on the two `−E8` summands.
fn small_symmetries() -> Vec<Isometry> {
    let n = K3_RANK;
    let mut out = Vec::with_capacity(1536);
    for m in hyperbolic_block_group() {
        for signs in 0..4u8 {
            let mut rows = m.matrix().to_vec();
            for (bit, off) in [(1u8, 6usize), (2, 14)] {
                if signs & bit != 0 {
                    for r in rows.iter_mut().skip(off).take(8) {
                        r.iter_mut().for_each(|x| *x = -*x);
                    }
                }
            }
            out.push(Isometry::from_columns_unchecked(
                &(0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect::<Vec<Vector>>(),
            ));
        }
    }
    out
}

/// Moves the first vector to `e1 + n f1` and the second to
/// `α (e1 − n f1) + g e2 + m f2` with `0 ≤ α < g`.
fn canonical_pair(lat: &IntegerLattice, v: &[Vector]) -> Result<(Isometry, Vec<Vector>), LatticeError> {
    let n8: Vec<usize> = (6..K3_RANK).collect();
    let rest0: Vec<usize> = [4, 5].into_iter().chain(n8.iter().copied()).collect();
    let mut red = Reducer::new(lat, v.to_vec());
    if !red.reduce(0, (0, 1), (2, 3), &rest0)? {
        return Err(LatticeError::NotFound { budget: 0 });
    }
    let nf = red.tracked[0][1];
    red.reduce(1, (2, 3), (4, 5), &n8)?;
    let s = red.tracked[1].clone();
    let (alpha, g) = (s[0], s[2]);
    if g != 0 && s[4] == 0 && s[5] == 0 && n8.iter().all(|&k| s[k] == 0) {
        let k = -Integer::div_floor(&alpha, &g);
        if k != 0 {
            let mut q = vec![0; K3_RANK];
            q[0] = k;
            q[1] = -k * nf;
            red.transvect(unit(K3_RANK, 3), q)?;
        }
    }
    Ok((red.isometry(), red.tracked.clone()))
}

/// Moves the third canonical vector to `±e3 + n f3` with transvections
/// `E_{e3, x}`, `E_{f3, x}` for `x ⟂ e3, f3` and the first two vectors, which
/// fix those vectors. Once one `H3` coordinate is a unit the rest is cleared
/// in a single step; until then moves are chosen greedily, with seeded random
/// moves when no move improves the score.
fn third_normal_form(lat: &IntegerLattice, c: &[Vector], cfg: SearchConfig) -> Result<(Isometry, Vector), LatticeError> {
    let n = K3_RANK;
    let (i_e, i_f) = (4, 5);
    let mut basis: Vec<Vector> = (6..n).map(|i| unit(n, i)).collect();
    let rows: Vec<Vec<i64>> = c[..2]
        .iter()
        .map(|v| lat.gram_apply(v).map(|gv| gv[..4].to_vec()))
        .collect::<Result<_, _>>()?;
    for k in linalg::integer_null_space(&rows, 4) {
        let mut x = vec![0; n];
        x[..4].copy_from_slice(&k);
        basis.push(x);
    }
    let mut moves: Vec<Transvection> = Vec::new();
    for iso in [unit(n, i_e), unit(n, i_f)] {
        for x in &basis {
            for s in [1, -1] {
                let a: Vector = x.iter().map(|&y| s * y).collect();
                moves.push(Transvection::new(lat, iso.clone(), a)?);
            }
        }
    }
    let score = |v: &[i64]| -> (u64, u64) {
        let (a, b) = (v[i_e].unsigned_abs(), v[i_f].unsigned_abs());
        (a.min(b), v.iter().map(|x| x.unsigned_abs()).sum())
    };
    let flip = |red: &mut Reducer| {
        for col in red.cols.iter_mut().chain(red.tracked.iter_mut()) {
            col.swap(i_e, i_f);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut red = Reducer::new(lat, vec![c[2].clone()]);
    for _ in 0..cfg.budget {
        let v = red.tracked[0].clone();
        if v[i_f].abs() == 1 && v[i_e].abs() != 1 {
            flip(&mut red);
            continue;
        }
        if v[i_e].abs() == 1 {
            let a = v[i_e];
            let mut x: Vector = v.iter().map(|&y| -y * a).collect();
            x[i_e] = 0;
            x[i_f] = 0;
            if x.iter().any(|&y| y != 0) {
                red.transvect(unit(n, i_f), x)?;
            }
            if red.tracked[0][i_e] < 0 {
                red.negate_plane((i_e, i_f));
            }
            return Ok((red.isometry(), red.tracked[0].clone()));
        }
        if v.iter().any(|x| x.abs() > 1 << 20) {
            red = Reducer::new(lat, vec![c[2].clone()]);
            continue;
        }
        let cur = score(&v);
        let mut best: Option<((u64, u64), usize)> = None;
        for (i, t) in moves.iter().enumerate() {
            let sc = score(&t.apply(&v)?);
            if sc < cur && best.as_ref().map_or(true, |(b, _)| sc < *b) {
                best = Some((sc, i));
            }
        }
        let i = match best {
            Some((_, i)) => i,
            None => rng.gen_range(0..moves.len()),
        };
        red.apply(&moves[i])?;
    }
    Err(LatticeError::NotFound { budget: cfg.budget })
}

/// Rank-one sample class data with an integral `cI` of the given square.
pub fn rank_one_example(square_half: i64) -> HyperKahlerClasses {
    let p = |b: usize| {
        let mut v = vec![0i64; K3_RANK];
        v[2 * b] = 1;
        v[2 * b + 1] = square_half;
        v
    };
    HyperKahlerClasses::new(to_rational(&p(0)), to_rational(&p(1)), to_rational(&p(2))).expect("valid classes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn square_eight_example_swaps_blocks() {
        let c = rank_one_example(4);
        let w = donaldson_match(&c, &c).unwrap();
        assert!(w.verified());
        let m = w.isometry.matrix();
        assert_eq!(m[2][0], 1);
        assert_eq!(m[0][2], 1);
        assert_eq!(m[4][4], -1);
        assert_eq!(m[6][6], 1);
    }

    #[test]
    fn mismatched_squares_are_infeasible() {
        let c1 = rank_one_example(3);
        let c2 = rank_one_example(4);
        assert!(matches!(donaldson_match(&c1, &c2), Err(LatticeError::Infeasible(_))));
    }

    #[test]
    fn degenerate_classes_rejected() {
        let p = to_rational(&super::super::add_scaled(&super::super::e(1), 4, &super::super::f(1)));
        let q = to_rational(&super::super::add_scaled(&super::super::e(3), 4, &super::super::f(3)));
        assert!(HyperKahlerClasses::new(p.clone(), p.clone(), q).is_err());
    }

    #[test]
    fn general_position_match() {
        let l = k3_lattice();
        let mut a = vec![0i64; K3_RANK];
        a[0] = 1;
        a[1] = 4;
        let mut b = vec![0i64; K3_RANK];
        b[2] = 1;
        b[3] = 4;
        let mut cvec = vec![0i64; K3_RANK];
        cvec[4] = 1;
        cvec[5] = 4;
        let c1 = HyperKahlerClasses::from_integers(&a, &b, &cvec).unwrap();
        let mut x = vec![0i64; K3_RANK];
        x[6] = 1;
        let t = Transvection::new(&l, unit(K3_RANK, 0), x).unwrap();
        let mv = |v: &[i64]| t.apply(v).unwrap();
        let c2 = HyperKahlerClasses::from_integers(&mv(&b), &mv(&a), &mv(&cvec.iter().map(|v| -v).collect::<Vec<_>>()))
            .unwrap();
        let w = donaldson_match(&c1, &c2).unwrap();
        assert!(w.verified());
    }

    #[test]
    fn rational_classes() {
        let c = rank_one_example(4);
        let half = |v: &[Rational]| v.iter().map(|x| x * rat(1, 2)).collect::<Vec<_>>();
        let c = HyperKahlerClasses::new(c.ci.clone(), half(&c.cj), half(&c.ck)).unwrap();
        assert_eq!(c.gram()[1][1], rat(2, 1));
        let w = donaldson_match(&c, &c);
        assert!(matches!(w, Err(LatticeError::Infeasible(_))));
    }

    #[test]
    fn rank_criterion() {
        let p = Polarization::generated_by(super::super::add_scaled(&super::super::e(1), 4, &super::super::f(1))).unwrap();
        assert!(matching_feasible_rank(&p, &p));
        let big = Polarization::new(
            IntegerLattice::new((0..6).map(|i| {
                let mut r = vec![0; 6];
                r[i] = -2;
                r
            }).collect()).unwrap(),
            vec![6, 7, 10, 12, 14, 15].into_iter().map(|i| {
                let mut v = vec![0; K3_RANK];
                v[i] = 1;
                v
            }).collect(),
        )
        .unwrap();
        assert_eq!(big.rank(), 6);
        assert!(!matching_feasible_rank(&big, &p));
    }
}
