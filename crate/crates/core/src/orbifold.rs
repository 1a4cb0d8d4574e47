//! Finite groups of affine isometries of T^7 with signed-permutation linear
//! parts, their fixed loci, the singular locus of the quotient, invariant
//! cohomology and the Betti numbers of a resolution.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::forms::{mask_axes, standard_phi0, KForm, DIM};
use crate::scalar::{rat, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrbifoldError {
    #[error("linear part is not a signed permutation: {0}")]
    NotSignedPermutation(String),
    #[error("translation {0} has denominator outside {{1, 2, 4}}")]
    BadTranslation(String),
    #[error("group closure exceeded bound {0}")]
    ClosureBound(usize),
    #[error("fixed set of {0} is not an axis-aligned subtorus")]
    UnsupportedFixedLocus(String),
    #[error("fixed components {0} and {1} overlap without coinciding")]
    OverlappingComponents(String, String),
    #[error("malformed group definition: {0}")]
    Json(String),
}

fn frac(x: Rational64) -> Rational64 {
    x - x.floor()
}

fn fmt_r64(x: &Rational64) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_r64(s: &str) -> Result<Rational64, OrbifoldError> {
    let err = || OrbifoldError::Json(format!("bad rational {s:?}"));
    match s.trim().split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| err())?;
            let d: i64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            Ok(Rational64::new(n, d))
        }
        None => Ok(Rational64::from_integer(s.trim().parse().map_err(|_| err())?)),
    }
}

/// `x ↦ L x + t (mod Z^7)` with `(L x)_i = signs[i] · x[perm[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineIsometry {
    perm: [usize; DIM],
    signs: [i8; DIM],
    translation: [Rational64; DIM],
}

impl AffineIsometry {
    pub fn new(perm: [usize; DIM], signs: [i8; DIM], translation: [Rational64; DIM]) -> Result<Self, OrbifoldError> {
        let mut seen = [false; DIM];
        for &p in &perm {
            if p >= DIM || seen[p] {
                return Err(OrbifoldError::NotSignedPermutation(format!("{perm:?}")));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(OrbifoldError::NotSignedPermutation(format!("signs {signs:?}")));
        }
        for t in &translation {
            if 4 % t.denom() != 0 {
                return Err(OrbifoldError::BadTranslation(fmt_r64(t)));
            }
        }
        Ok(AffineIsometry { perm, signs, translation: translation.map(frac) })
    }

    pub fn diagonal(signs: [i8; DIM], translation: [Rational64; DIM]) -> Result<Self, OrbifoldError> {
        Self::new([0, 1, 2, 3, 4, 5, 6], signs, translation)
    }

    /// From an integer matrix; rejects anything but signed permutations.
    pub fn from_matrix(m: &[Vec<i64>], translation: [Rational64; DIM]) -> Result<Self, OrbifoldError> {
        let bad = || OrbifoldError::NotSignedPermutation(format!("{m:?}"));
        if m.len() != DIM {
            return Err(bad());
        }
        let mut perm = [0; DIM];
        let mut signs = [1; DIM];
        for (i, row) in m.iter().enumerate() {
            let nz: Vec<usize> = (0..row.len()).filter(|&j| row[j] != 0).collect();
            if row.len() != DIM || nz.len() != 1 || row[nz[0]].abs() != 1 {
                return Err(bad());
            }
            perm[i] = nz[0];
            signs[i] = row[nz[0]] as i8;
        }
        Self::new(perm, signs, translation)
    }

    pub fn identity() -> Self {
        AffineIsometry { perm: [0, 1, 2, 3, 4, 5, 6], signs: [1; DIM], translation: [Rational64::zero(); DIM] }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn translation(&self) -> &[Rational64; DIM] {
        &self.translation
    }

    pub fn signs(&self) -> &[i8; DIM] {
        &self.signs
    }

    pub fn perm(&self) -> &[usize; DIM] {
        &self.perm
    }

    /// Linear part as a 7×7 matrix over any scalar domain.
    pub fn linear_matrix<T: crate::Scalar>(&self) -> Vec<Vec<T>> {
        let mut m = vec![vec![T::zero(); DIM]; DIM];
        for i in 0..DIM {
            m[i][self.perm[i]] = T::from_i64(self.signs[i] as i64);
        }
        m
    }

    fn apply_linear(&self, x: &[Rational64; DIM]) -> [Rational64; DIM] {
        let mut out = [Rational64::zero(); DIM];
        for i in 0..DIM {
            out[i] = x[self.perm[i]] * Rational64::from_integer(self.signs[i] as i64);
        }
        out
    }

    /// Image of a point, reduced mod 1.
    pub fn apply(&self, x: &[Rational64; DIM]) -> [Rational64; DIM] {
        let lx = self.apply_linear(x);
        std::array::from_fn(|i| frac(lx[i] + self.translation[i]))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut perm = [0; DIM];
        let mut signs = [1; DIM];
        for i in 0..DIM {
            perm[i] = other.perm[self.perm[i]];
            signs[i] = self.signs[i] * other.signs[self.perm[i]];
        }
        let lt = self.apply_linear(&other.translation);
        let translation = std::array::from_fn(|i| frac(lt[i] + self.translation[i]));
        AffineIsometry { perm, signs, translation }
    }

    pub fn inverse(&self) -> Self {
        let mut perm = [0; DIM];
        let mut signs = [1; DIM];
        for i in 0..DIM {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        let lin = AffineIsometry { perm, signs, translation: [Rational64::zero(); DIM] };
        let t = lin.apply_linear(&self.translation);
        AffineIsometry { perm, signs, translation: t.map(|v| frac(-v)) }
    }

    pub fn order(&self) -> usize {
        let mut g = self.clone();
        let mut n = 1;
        while !g.is_identity() {
            g = g.compose(self);
            n += 1;
        }
        n
    }

    /// Exact check that the linear part pulls φ0 back to itself.
    pub fn preserves_phi0(&self) -> bool {
        let phi: KForm<Rational> = standard_phi0();
        phi.pullback(&self.linear_matrix()) == phi
    }

    /// Solves `L x + t ≡ x (mod Z^7)` one permutation cycle at a time.
    pub fn fixed_locus(&self) -> Result<Vec<FixedComponent>, OrbifoldError> {
        let mut visited = [false; DIM];
        let mut free_axes = Vec::new();
        // Each cycle contributes a list of alternative pinnings.
        let mut choices: Vec<Vec<Vec<(usize, Rational64)>>> = Vec::new();
        for start in 0..DIM {
            if visited[start] {
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let mut cur = self.perm[start];
            while cur != start {
                visited[cur] = true;
                cycle.push(cur);
                cur = self.perm[cur];
            }
            // x[c0] = a · x[c0] + b after walking the cycle.
            let mut a = Rational64::one();
            let mut b = Rational64::zero();
            for &c in &cycle {
                b += a * self.translation[c];
                a *= Rational64::from_integer(self.signs[c] as i64);
            }
            if a.is_one() {
                if !frac(b).is_zero() {
                    return Ok(Vec::new());
                }
                if cycle.len() > 1 {
                    return Err(OrbifoldError::UnsupportedFixedLocus(self.describe()));
                }
                free_axes.push(start);
                continue;
            }
            let half = Rational64::new(1, 2);
            let mut alts = Vec::new();
            for j in 0..2 {
                let x0 = frac(b * half + half * Rational64::from_integer(j));
                let mut pins = vec![(cycle[0], x0)];
                let mut x = x0;
                for &c in &cycle[..cycle.len() - 1] {
                    let next = (x - self.translation[c]) * Rational64::from_integer(self.signs[c] as i64);
                    x = frac(next);
                    pins.push((self.perm[c], x));
                }
                alts.push(pins);
            }
            choices.push(alts);
        }
        free_axes.sort_unstable();
        let mut out = vec![BTreeMap::new()];
        for alts in choices {
            let mut next = Vec::new();
            for base in &out {
                for pins in &alts {
                    let mut m: BTreeMap<usize, Rational64> = base.clone();
                    m.extend(pins.iter().copied());
                    next.push(m);
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(|pinned| FixedComponent { free_axes: free_axes.clone(), pinned }).collect())
    }

    pub fn describe(&self) -> String {
        let lin: Vec<String> = (0..DIM)
            .map(|i| format!("{}x{}", if self.signs[i] > 0 { "+" } else { "-" }, self.perm[i] + 1))
            .collect();
        let t: Vec<String> = self.translation.iter().map(fmt_r64).collect();
        format!("({}) + ({})", lin.join(","), t.join(","))
    }

    pub fn to_json(&self) -> Value {
        let t: Vec<String> = self.translation.iter().map(fmt_r64).collect();
        if self.is_diagonal() {
            json!({ "diag": self.signs, "t": t })
        } else {
            let perm: Vec<usize> = self.perm.iter().map(|p| p + 1).collect();
            json!({ "perm": perm, "signs": self.signs, "t": t })
        }
    }

    /// Accepts `{"diag": [...], "t": [...]}` or `{"perm": [1-based], "signs": [...], "t": [...]}`.
    pub fn from_json(v: &Value) -> Result<Self, OrbifoldError> {
        let err = |m: &str| OrbifoldError::Json(m.to_string());
        let ints = |key: &str| -> Result<Option<Vec<i64>>, OrbifoldError> {
            match v.get(key) {
                None => Ok(None),
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| err(&format!("{key} entries must be integers"))))
                    .collect::<Result<Vec<_>, _>>()
                    .map(Some),
                Some(_) => Err(err(&format!("{key} must be an array"))),
            }
        };
        let to7 = |xs: Vec<i64>, key: &str| -> Result<[i64; DIM], OrbifoldError> {
            xs.try_into().map_err(|_| err(&format!("{key} needs 7 entries")))
        };
        let t: [Rational64; DIM] = match v.get("t") {
            None => [Rational64::zero(); DIM],
            Some(Value::Array(a)) if a.len() == DIM => {
                let mut t = [Rational64::zero(); DIM];
                for (i, x) in a.iter().enumerate() {
                    t[i] = match x {
                        Value::String(s) => parse_r64(s)?,
                        Value::Number(n) => Rational64::from_integer(n.as_i64().ok_or_else(|| err("t entries must be strings or integers"))?),
                        _ => return Err(err("t entries must be strings")),
                    };
                }
                t
            }
            Some(_) => return Err(err("t needs 7 entries")),
        };
        if let Some(d) = ints("diag")? {
            let d = to7(d, "diag")?;
            return Self::diagonal(d.map(|s| s as i8), t).and_then(|g| {
                if d.iter().all(|s| s.abs() == 1) {
                    Ok(g)
                } else {
                    Err(OrbifoldError::NotSignedPermutation(format!("{d:?}")))
                }
            });
        }
        if let Some(rows) = v.get("matrix").and_then(Value::as_array) {
            let m: Vec<Vec<i64>> = rows
                .iter()
                .map(|r| r.as_array().map(|a| a.iter().filter_map(Value::as_i64).collect()).unwrap_or_default())
                .collect();
            return Self::from_matrix(&m, t);
        }
        let perm = to7(ints("perm")?.ok_or_else(|| err("need diag, perm or matrix"))?, "perm")?;
        let signs = to7(ints("signs")?.unwrap_or(vec![1; DIM]), "signs")?;
        if perm.iter().any(|&p| !(1..=DIM as i64).contains(&p)) || signs.iter().any(|s| s.abs() != 1) {
            return Err(OrbifoldError::NotSignedPermutation(format!("{perm:?} {signs:?}")));
        }
        Self::new(perm.map(|p| (p - 1) as usize), signs.map(|s| s as i8), t)
    }
}

/// An axis-aligned subtorus: the listed axes run freely, the others are pinned.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixedComponent {
    pub free_axes: Vec<usize>,
    pub pinned: BTreeMap<usize, Rational64>,
}

impl FixedComponent {
    pub fn dimension(&self) -> usize {
        self.free_axes.len()
    }

    pub fn image(&self, g: &AffineIsometry) -> FixedComponent {
        let mut free_axes = Vec::new();
        let mut pinned = BTreeMap::new();
        for i in 0..DIM {
            let src = g.perm[i];
            match self.pinned.get(&src) {
                None => free_axes.push(i),
                Some(v) => {
                    pinned.insert(i, frac(*v * Rational64::from_integer(g.signs[i] as i64) + g.translation[i]));
                }
            }
        }
        FixedComponent { free_axes, pinned }
    }

    /// Axis-aligned subtori meet iff they agree on every commonly pinned axis.
    pub fn intersects(&self, other: &FixedComponent) -> bool {
        self.pinned.iter().all(|(a, v)| other.pinned.get(a).map_or(true, |w| w == v))
    }

    /// Whether `g` fixes every point of the component.
    pub fn fixed_pointwise_by(&self, g: &AffineIsometry) -> bool {
        (0..DIM).all(|i| match self.pinned.get(&i) {
            None => g.perm[i] == i && g.signs[i] == 1 && g.translation[i].is_zero(),
            Some(v) => match self.pinned.get(&g.perm[i]) {
                None => false,
                Some(w) => frac(*w * Rational64::from_integer(g.signs[i] as i64) + g.translation[i]) == *v,
            },
        })
    }

    pub fn describe(&self) -> String {
        (0..DIM)
            .map(|i| match self.pinned.get(&i) {
                None => "*".to_string(),
                Some(v) => fmt_r64(v),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_json(&self) -> Value {
        let free: Vec<usize> = self.free_axes.iter().map(|a| a + 1).collect();
        let pinned: serde_json::Map<String, Value> =
            self.pinned.iter().map(|(a, v)| ((a + 1).to_string(), Value::String(fmt_r64(v)))).collect();
        json!({ "free_axes": free, "pinned": pinned })
    }
}

/// A finite group of affine isometries, each element labeled by a word in
/// the generators.
#[derive(Clone, Debug)]
pub struct OrbifoldGroup {
    elements: Vec<AffineIsometry>,
    labels: Vec<String>,
    generator_labels: Vec<String>,
}

impl OrbifoldGroup {
    /// Breadth-first closure under right multiplication by generators.
    pub fn generate(gens: &[AffineIsometry], labels: &[String], bound: usize) -> Result<Self, OrbifoldError> {
        let gen_labels: Vec<String> = (0..gens.len())
            .map(|i| labels.get(i).cloned().unwrap_or_else(|| format!("g{}", i + 1)))
            .collect();
        let mut index: HashMap<AffineIsometry, usize> = HashMap::new();
        let mut elements = vec![AffineIsometry::identity()];
        let mut words = vec!["e".to_string()];
        index.insert(AffineIsometry::identity(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (g, gl) in gens.iter().zip(&gen_labels) {
                let h = elements[i].compose(g);
                if index.contains_key(&h) {
                    continue;
                }
                if elements.len() >= bound {
                    return Err(OrbifoldError::ClosureBound(bound));
                }
                let word = if i == 0 { gl.clone() } else { format!("{}*{}", words[i], gl) };
                index.insert(h.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(h);
                words.push(word);
            }
        }
        Ok(OrbifoldGroup { elements, labels: words, generator_labels: gen_labels })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[AffineIsometry] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generator_labels(&self) -> &[String] {
        &self.generator_labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &AffineIsometry)> {
        self.labels.iter().zip(&self.elements)
    }

    pub fn is_abelian(&self) -> bool {
        self.elements.iter().all(|a| self.elements.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    /// Fixed components of every non-identity element, keyed by label.
    pub fn fixed_loci(&self) -> Result<Vec<(String, Vec<FixedComponent>)>, OrbifoldError> {
        self.iter()
            .filter(|(_, g)| !g.is_identity())
            .map(|(l, g)| Ok((l.clone(), g.fixed_locus()?)))
            .collect()
    }

    /// Partitions components into orbits under this group.
    pub fn orbits(&self, components: &[FixedComponent]) -> Vec<Vec<FixedComponent>> {
        let mut remaining: Vec<FixedComponent> = components.to_vec();
        let mut out = Vec::new();
        while let Some(c) = remaining.first().cloned() {
            let mut orbit: Vec<FixedComponent> = Vec::new();
            for g in &self.elements {
                let img = c.image(g);
                if !orbit.contains(&img) {
                    orbit.push(img);
                }
            }
            remaining.retain(|x| !orbit.contains(x));
            out.push(orbit);
        }
        out
    }

    /// Components of the singular locus of `T^7 / G`, one representative per orbit.
    pub fn singular_locus(&self) -> Result<Vec<SingularComponent>, OrbifoldError> {
        let mut comps: Vec<FixedComponent> = Vec::new();
        for (_, locus) in self.fixed_loci()? {
            for c in locus {
                if !comps.contains(&c) {
                    comps.push(c);
                }
            }
        }
        for (i, a) in comps.iter().enumerate() {
            for b in &comps[i + 1..] {
                if a.intersects(b) {
                    return Err(OrbifoldError::OverlappingComponents(a.describe(), b.describe()));
                }
            }
        }
        let mut out = Vec::new();
        for orbit in self.orbits(&comps) {
            let rep = orbit[0].clone();
            let setwise = self.elements.iter().filter(|g| rep.image(g) == rep).count();
            let fixed_by = self
                .iter()
                .filter(|(_, g)| !g.is_identity() && rep.fixed_pointwise_by(g))
                .map(|(l, _)| l.clone())
                .collect();
            out.push(SingularComponent {
                representative: rep,
                orbit_size: self.order() / setwise,
                setwise_stabilizer_order: setwise,
                fixed_by,
            });
        }
        Ok(out)
    }

    /// Dimensions of the invariant subspaces of `Λ^k (R^7)*`, `k = 0..7`,
    /// by the character average `(1/|G|) Σ_g tr Λ^k L_g`.
    pub fn invariant_betti(&self) -> [usize; DIM + 1] {
        let mut out = [0; DIM + 1];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut total: i64 = 0;
            for g in &self.elements {
                total += exterior_trace(g, k);
            }
            let (q, r) = total.div_rem(&(self.order() as i64));
            debug_assert_eq!(r, 0);
            *slot = q as usize;
        }
        out
    }

    /// Monomials `dx^I` of degree `k` fixed by every linear part (0-based axes).
    pub fn invariant_monomials(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = (0u8..128)
            .filter(|m| m.count_ones() as usize == k)
            .map(mask_axes)
            .filter(|axes| {
                let m = KForm::<Rational>::monomial(axes, rat(1, 1)).expect("increasing axes");
                self.elements.iter().all(|g| m.pullback(&g.linear_matrix()) == m)
            })
            .collect();
        out.sort();
        out
    }
}

/// `tr Λ^k L` for a signed permutation: sum over k-sets mapped to
/// themselves of the induced sign.
fn exterior_trace(g: &AffineIsometry, k: usize) -> i64 {
    let mut total = 0;
    for m in 0u8..128 {
        if m.count_ones() as usize != k {
            continue;
        }
        let axes = mask_axes(m);
        if !axes.iter().all(|&a| m & (1 << g.perm[a]) != 0) {
            continue;
        }
        let mut sign: i64 = axes.iter().map(|&a| g.signs[a] as i64).product();
        let images: Vec<usize> = axes.iter().map(|&a| g.perm[a]).collect();
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if images[i] > images[j] {
                    sign = -sign;
                }
            }
        }
        total += sign;
    }
    total
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularComponent {
    pub representative: FixedComponent,
    pub orbit_size: usize,
    pub setwise_stabilizer_order: usize,
    /// Labels of the non-identity elements fixing the component pointwise.
    pub fixed_by: Vec<String>,
}

impl SingularComponent {
    pub fn to_json(&self) -> Value {
        json!({
            "representative": self.representative.to_json(),
            "dimension": self.representative.dimension(),
            "orbit_size": self.orbit_size,
            "setwise_stabilizer_order": self.setwise_stabilizer_order,
            "fixed_by": self.fixed_by,
        })
    }
}

/// Summary of an orbifold `T^7 / G`.
#[derive(Clone, Debug)]
pub struct OrbifoldReport {
    pub group_order: usize,
    pub fixed_loci: Vec<(String, Vec<FixedComponent>)>,
    pub singular_locus: Vec<SingularComponent>,
    pub invariant_betti: [usize; DIM + 1],
    pub preserves_phi0: bool,
    pub simply_connected_asserted: Option<bool>,
}

impl OrbifoldReport {
    pub fn build(group: &OrbifoldGroup) -> Result<Self, OrbifoldError> {
        Ok(OrbifoldReport {
            group_order: group.order(),
            fixed_loci: group.fixed_loci()?,
            singular_locus: group.singular_locus()?,
            invariant_betti: group.invariant_betti(),
            preserves_phi0: group.elements().iter().all(AffineIsometry::preserves_phi0),
            simply_connected_asserted: None,
        })
    }

    /// `b_i(M) = b_i^G + (#components) · Δb_i` for `i = 2, 3`.
    pub fn resolution_betti(&self, delta_b2: i64, delta_b3: i64) -> (i64, i64) {
        let n = self.singular_locus.len() as i64;
        (self.invariant_betti[2] as i64 + n * delta_b2, self.invariant_betti[3] as i64 + n * delta_b3)
    }

    pub fn to_json(&self) -> Value {
        let fixed: Vec<Value> = self
            .fixed_loci
            .iter()
            .map(|(l, cs)| {
                json!({ "element": l, "count": cs.len(), "components": cs.iter().map(FixedComponent::to_json).collect::<Vec<_>>() })
            })
            .collect();
        json!({
            "group_order": self.group_order,
            "preserves_phi0": self.preserves_phi0,
            "fixed_loci": fixed,
            "singular_locus": self.singular_locus.iter().map(SingularComponent::to_json).collect::<Vec<_>>(),
            "singular_component_count": self.singular_locus.len(),
            "invariant_betti": self.invariant_betti,
            "simply_connected_asserted": self.simply_connected_asserted,
        })
    }
}

/// Joyce's α, β, γ.
pub fn joyce_generators() -> [AffineIsometry; 3] {
    let z = Rational64::zero();
    let h = Rational64::new(1, 2);
    [
        AffineIsometry::diagonal([1, 1, 1, -1, -1, -1, -1], [z; DIM]).expect("valid"),
        AffineIsometry::diagonal([1, -1, -1, 1, 1, -1, -1], [z, z, z, z, z, h, z]).expect("valid"),
        AffineIsometry::diagonal([-1, 1, -1, 1, -1, 1, -1], [z, z, z, z, h, z, h]).expect("valid"),
    ]
}

pub fn joyce_labels() -> Vec<String> {
    vec!["alpha".into(), "beta".into(), "gamma".into()]
}

/// Joyce's group together with the catalog assertion that the quotient is
/// simply connected.
pub fn joyce_group() -> OrbifoldGroup {
    OrbifoldGroup::generate(&joyce_generators(), &joyce_labels(), 64).expect("order 8")
}

pub fn joyce_report() -> Result<OrbifoldReport, OrbifoldError> {
    let mut r = OrbifoldReport::build(&joyce_group())?;
    r.simply_connected_asserted = Some(true);
    Ok(r)
}

/// Parses `{"generators": [...], "labels": [...]}`.
pub fn parse_group_file(v: &Value) -> Result<(Vec<AffineIsometry>, Vec<String>), OrbifoldError> {
    let gens = v
        .get("generators")
        .and_then(Value::as_array)
        .ok_or_else(|| OrbifoldError::Json("missing generators array".into()))?;
    let gens = gens
        .iter()
        .enumerate()
        .map(|(i, g)| AffineIsometry::from_json(g).map_err(|e| OrbifoldError::Json(format!("generators[{i}]: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let labels = v
        .get("labels")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(|x| x.as_str().map(String::from)).collect())
        .unwrap_or_default();
    Ok((gens, labels))
}
