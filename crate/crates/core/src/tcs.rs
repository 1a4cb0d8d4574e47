//! Twisted connected sums: building-block catalog, the Betti sum, the
//! fundamental-group flag, and exact checks on the flat neck model.
//!
//! Neck coordinates are `(t, θ, θ̃)` on axes 0, 1, 2 and the flat `T^4`
//! occupies axes 3..6. The cylindrical form is
//! `φ∞ = dt∧dθ∧dθ̃ + dθ∧κ_I + dθ̃∧κ_J − dt∧κ_K`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::forms::{is_positive, FormError, KForm};
use crate::k3::{add_scaled, e, f, LatticeError, Polarization};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TcsError {
    #[error("block {0} is missing {1}")]
    Unknown(String, &'static str),
    #[error("invalid building block: {0}")]
    InvalidBlock(String),
    #[error("no catalog entry named {0:?}")]
    NoSuchBlock(String),
    #[error("asserted b2 = {b2} exceeds the Betti sum {sum}")]
    BadB2 { b2: u32, sum: u32 },
    #[error("invalid neck triple: {0}")]
    InvalidTriple(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("malformed catalog: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    FanoType,
    InvolutionType,
}

impl BlockKind {
    fn parse(s: &str) -> Result<Self, TcsError> {
        match s {
            "fano-type" => Ok(BlockKind::FanoType),
            "involution-type" => Ok(BlockKind::InvolutionType),
            other => Err(TcsError::Json(format!("unknown block kind {other:?}"))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            BlockKind::FanoType => "fano-type",
            BlockKind::InvolutionType => "involution-type",
        }
    }
}

/// A building block `W̄` with its anticanonical K3 divisor. Betti data and
/// the simply-connected flag are `None` when unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingBlock {
    pub name: String,
    pub b2_bar: Option<u32>,
    pub b3_bar: Option<u32>,
    pub d: Option<u32>,
    pub polarization: Polarization,
    pub simply_connected: Option<bool>,
    pub kind: BlockKind,
}

impl BuildingBlock {
    pub fn validate(&self) -> Result<(), TcsError> {
        if let (Some(d), Some(b2)) = (self.d, self.b2_bar) {
            if d > b2 {
                return Err(TcsError::InvalidBlock(format!("{}: d = {d} exceeds b2 = {b2}", self.name)));
            }
        }
        Ok(())
    }

    fn require(&self, v: Option<u32>, what: &'static str) -> Result<u32, TcsError> {
        v.ok_or_else(|| TcsError::Unknown(self.name.clone(), what))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type": "block",
            "name": self.name,
            "b2_bar": self.b2_bar,
            "b3_bar": self.b3_bar,
            "d": self.d,
            "polarization": self.polarization.to_json(),
            "simply_connected": self.simply_connected,
            "kind": self.kind.as_str(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, TcsError> {
        let opt_u32 = |k: &str| -> Result<Option<u32>, TcsError> {
            match v.get(k) {
                None | Some(Value::Null) => Ok(None),
                Some(x) => x
                    .as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .map(Some)
                    .ok_or_else(|| TcsError::Json(format!("{k} must be a nonnegative integer"))),
            }
        };
        let name = v.get("name").and_then(Value::as_str).ok_or_else(|| TcsError::Json("missing name".into()))?;
        let pol = v.get("polarization").ok_or_else(|| TcsError::Json("missing polarization".into()))?;
        let simply_connected = match v.get("simply_connected") {
            None | Some(Value::Null) => None,
            Some(x) => Some(x.as_bool().ok_or_else(|| TcsError::Json("simply_connected must be a boolean".into()))?),
        };
        let kind = v.get("kind").and_then(Value::as_str).unwrap_or("fano-type");
        let b = BuildingBlock {
            name: name.to_string(),
            b2_bar: opt_u32("b2_bar")?,
            b3_bar: opt_u32("b3_bar")?,
            d: opt_u32("d")?,
            polarization: Polarization::from_json(pol)?,
            simply_connected,
            kind: BlockKind::parse(kind)?,
        };
        b.validate()?;
        Ok(b)
    }
}

/// A comparison record carrying only Betti numbers of some `G2`-manifold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceRecord {
    pub name: String,
    pub b2: u32,
    pub b3: u32,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogEntry {
    Block(BuildingBlock),
    Reference(ReferenceRecord),
}

impl CatalogEntry {
    pub fn name(&self) -> &str {
        match self {
            CatalogEntry::Block(b) => &b.name,
            CatalogEntry::Reference(r) => &r.name,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CatalogEntry::Block(b) => b.to_json(),
            CatalogEntry::Reference(r) => {
                json!({ "type": "reference", "name": r.name, "b2": r.b2, "b3": r.b3, "note": r.note })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, TcsError> {
        match v.get("type").and_then(Value::as_str) {
            Some("block") => Ok(CatalogEntry::Block(BuildingBlock::from_json(v)?)),
            Some("reference") => {
                let num = |k: &str| {
                    v.get(k)
                        .and_then(Value::as_u64)
                        .and_then(|n| u32::try_from(n).ok())
                        .ok_or_else(|| TcsError::Json(format!("reference record needs integer {k}")))
                };
                Ok(CatalogEntry::Reference(ReferenceRecord {
                    name: v.get("name").and_then(Value::as_str).unwrap_or_default().to_string(),
                    b2: num("b2")?,
                    b3: num("b3")?,
                    note: v.get("note").and_then(Value::as_str).unwrap_or_default().to_string(),
                }))
            }
            other => Err(TcsError::Json(format!("unknown entry type {other:?}"))),
        }
    }
}

pub fn catalog_to_json(entries: &[CatalogEntry]) -> Value {
    Value::Array(entries.iter().map(CatalogEntry::to_json).collect())
}

pub fn catalog_from_json(v: &Value) -> Result<Vec<CatalogEntry>, TcsError> {
    v.as_array()
        .ok_or_else(|| TcsError::Json("catalog must be a list".into()))?
        .iter()
        .map(CatalogEntry::from_json)
        .collect()
}

/// Sample catalog: the blow-up of the octic double solid, the sextic
/// polarization, and a Joyce-type comparison record.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    let pol = |n: i64| Polarization::generated_by(add_scaled(&e(1), n, &f(1))).expect("rank-one polarization");
    vec![
        CatalogEntry::Block(BuildingBlock {
            name: "x8-blowup".into(),
            b2_bar: Some(2),
            b3_bar: Some(38),
            d: Some(0),
            polarization: pol(4),
            simply_connected: Some(true),
            kind: BlockKind::FanoType,
        }),
        CatalogEntry::Block(BuildingBlock {
            name: "x6".into(),
            b2_bar: None,
            b3_bar: None,
            d: None,
            polarization: pol(3),
            simply_connected: None,
            kind: BlockKind::FanoType,
        }),
        CatalogEntry::Reference(ReferenceRecord {
            name: "joyce-comparison".into(),
            b2: 0,
            b3: 215,
            note: "orbifold-resolution example with the same b2 as the x8 pair".into(),
        }),
    ]
}

pub fn find_block<'a>(catalog: &'a [CatalogEntry], name: &str) -> Result<&'a BuildingBlock, TcsError> {
    catalog
        .iter()
        .find_map(|e| match e {
            CatalogEntry::Block(b) if b.name == name => Some(b),
            _ => None,
        })
        .ok_or_else(|| TcsError::NoSuchBlock(name.to_string()))
}

/// `b²(M) + b³(M) = b̄³₁ + b̄³₂ + 2d₁ + 2d₂ + 23`.
pub fn betti_sum(b1: &BuildingBlock, b2: &BuildingBlock) -> Result<u32, TcsError> {
    let (b31, d1) = (b1.require(b1.b3_bar, "b3_bar")?, b1.require(b1.d, "d")?);
    let (b32, d2) = (b2.require(b2.b3_bar, "b3_bar")?, b2.require(b2.d, "d")?);
    Ok(b31 + b32 + 2 * d1 + 2 * d2 + 23)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pi1 {
    SimplyConnected,
    Finite,
}

/// Simply connected when both blocks are flagged so; finite otherwise.
pub fn pi1_flag(b1: &BuildingBlock, b2: &BuildingBlock) -> Pi1 {
    if b1.simply_connected == Some(true) && b2.simply_connected == Some(true) {
        Pi1::SimplyConnected
    } else {
        Pi1::Finite
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TcsReport {
    pub block1: String,
    pub block2: String,
    pub betti_sum: u32,
    pub b2_asserted: Option<u32>,
    pub b3_if_b2_known: Option<u32>,
    pub pi1: Pi1,
    pub pi1_finite: bool,
}

pub fn tcs_report(b1: &BuildingBlock, b2: &BuildingBlock, b2_asserted: Option<u32>) -> Result<TcsReport, TcsError> {
    let sum = betti_sum(b1, b2)?;
    let b3 = match b2_asserted {
        Some(b) if b > sum => return Err(TcsError::BadB2 { b2: b, sum }),
        Some(b) => Some(sum - b),
        None => None,
    };
    Ok(TcsReport {
        block1: b1.name.clone(),
        block2: b2.name.clone(),
        betti_sum: sum,
        b2_asserted,
        b3_if_b2_known: b3,
        pi1: pi1_flag(b1, b2),
        pi1_finite: true,
    })
}

/// Constant hyper-Kähler triple on the flat `T^4` (axes 3..6).
#[derive(Clone, Debug, PartialEq)]
pub struct NeckModel<T: Scalar> {
    kappa: [KForm<T>; 3],
}

const T4_AXES: [usize; 4] = [3, 4, 5, 6];

impl<T: Scalar> NeckModel<T> {
    /// Validates `κ_a ∧ κ_b = δ_ab c vol_4` with `c > 0` and support on `T^4`.
    pub fn new(kappa_i: KForm<T>, kappa_j: KForm<T>, kappa_k: KForm<T>) -> Result<Self, TcsError> {
        let kappa = [kappa_i, kappa_j, kappa_k];
        for k in &kappa {
            if k.degree() != 2 {
                return Err(TcsError::InvalidTriple("classes must be 2-forms".into()));
            }
            if k.terms().any(|(axes, c)| !c.is_zero() && axes.iter().any(|a| !T4_AXES.contains(a))) {
                return Err(TcsError::InvalidTriple("classes must live on the T^4 axes".into()));
            }
        }
        let c = kappa[0].wedge(&kappa[0])?.coeff(&T4_AXES);
        if c.sign() <= 0 {
            return Err(TcsError::InvalidTriple("κ_I ∧ κ_I must be a positive volume".into()));
        }
        for a in 0..3 {
            for b in a..3 {
                let p = kappa[a].wedge(&kappa[b])?.coeff(&T4_AXES);
                let want = if a == b { c.clone() } else { T::zero() };
                if p != want {
                    return Err(TcsError::InvalidTriple(format!("κ wedge table fails at ({a},{b})")));
                }
            }
        }
        Ok(NeckModel { kappa })
    }

    /// `κ_I = e45 + e67`, `κ_J = e46 − e57`, `κ_K = e47 + e56` (1-based labels).
    pub fn flat() -> Self {
        let k = |terms: &[(&str, i64)]| KForm::from_terms(2, terms).expect("valid labels");
        NeckModel { kappa: [k(&[("45", 1), ("67", 1)]), k(&[("46", 1), ("57", -1)]), k(&[("47", 1), ("56", 1)])] }
    }

    pub fn kappa(&self) -> &[KForm<T>; 3] {
        &self.kappa
    }

    /// Image under `κ_I ↦ κ_J, κ_J ↦ κ_I, κ_K ↦ −κ_K`.
    pub fn rotated(&self) -> Self {
        NeckModel { kappa: [self.kappa[1].clone(), self.kappa[0].clone(), self.kappa[2].neg()] }
    }

    /// Same triple without negating `κ_K`; not a valid matching partner.
    pub fn rotated_without_negation(&self) -> Self {
        NeckModel { kappa: [self.kappa[1].clone(), self.kappa[0].clone(), self.kappa[2].clone()] }
    }
}

pub fn neck_form<T: Scalar>(m: &NeckModel<T>) -> KForm<T> {
    let d = |i| KForm::<T>::dx(i);
    let w = |a: &KForm<T>, b: &KForm<T>| a.wedge(b).expect("degrees fit");
    let [ki, kj, kk] = &m.kappa;
    w(&w(&d(0), &d(1)), &d(2))
        .add(&w(&d(1), ki))
        .and_then(|x| x.add(&w(&d(2), kj)))
        .and_then(|x| x.sub(&w(&d(0), kk)))
        .expect("degree 3 throughout")
}

/// The constant part of the gluing map: `t ↦ −t`, `θ ↔ θ̃`, identity on `T^4`.
pub fn gluing_matrix<T: Scalar>() -> Vec<Vec<T>> {
    let mut a = vec![vec![T::zero(); 7]; 7];
    a[0][0] = T::from_i64(-1);
    a[1][2] = T::from_i64(1);
    a[2][1] = T::from_i64(1);
    for i in 3..7 {
        a[i][i] = T::from_i64(1);
    }
    a
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluingCheck<T: Scalar> {
    pub residual: KForm<T>,
    pub preserved: bool,
    pub max_coefficient: f64,
}

/// `F^* φ∞(model2) − φ∞(model1)`; zero exactly when the triples are matched.
pub fn gluing_pullback_check<T: Scalar>(m1: &NeckModel<T>, m2: &NeckModel<T>) -> GluingCheck<T> {
    let pulled = neck_form(m2).pullback(&gluing_matrix::<T>());
    let residual = pulled.sub(&neck_form(m1)).expect("same degree");
    GluingCheck { preserved: residual.is_zero(), max_coefficient: residual.max_abs(), residual }
}

/// `φ = dx0 ∧ ω + Re Ω` for `ω`, `Re Ω` supported on axes 1..6.
pub fn su3_product_form<T: Scalar>(omega: &KForm<T>, re_omega: &KForm<T>) -> Result<KForm<T>, TcsError> {
    if omega.degree() != 2 || re_omega.degree() != 3 {
        return Err(FormError::DegreeMismatch(omega.degree(), 2).into());
    }
    for k in [omega, re_omega] {
        if k.terms().any(|(axes, c)| !c.is_zero() && axes.contains(&0)) {
            return Err(TcsError::InvalidTriple("SU(3) data must not involve axis 0".into()));
        }
    }
    let phi = KForm::dx(0).wedge(omega)?.add(re_omega)?;
    if !is_positive(&phi) {
        return Err(FormError::NotPositive.into());
    }
    Ok(phi)
}

/// Standard flat `ω = e23 + e45 + e67` and `Re Ω = e246 − e257 − e347 − e356`.
pub fn standard_su3<T: Scalar>() -> (KForm<T>, KForm<T>) {
    (
        KForm::from_terms(2, &[("23", 1), ("45", 1), ("67", 1)]).expect("valid labels"),
        KForm::from_terms(3, &[("246", 1), ("257", -1), ("347", -1), ("356", -1)]).expect("valid labels"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{metric_from_three_form, standard_phi0, MetricTensor};
    use crate::Rational;

    fn x8() -> BuildingBlock {
        find_block(&builtin_catalog(), "x8-blowup").unwrap().clone()
    }

    #[test]
    fn betti_examples() {
        let b = x8();
        assert_eq!(betti_sum(&b, &b).unwrap(), 99);
        let r = tcs_report(&b, &b, Some(0)).unwrap();
        assert_eq!(r.b3_if_b2_known, Some(99));
        let mut z = b.clone();
        z.b3_bar = Some(0);
        assert_eq!(betti_sum(&z, &z).unwrap(), 23);
        let mut one = b.clone();
        one.d = Some(1);
        assert_eq!(betti_sum(&one, &one).unwrap(), 103);
        let cat = builtin_catalog();
        let x6 = find_block(&cat, "x6").unwrap();
        assert!(matches!(betti_sum(x6, &b), Err(TcsError::Unknown(..))));
    }

    #[test]
    fn pi1_examples() {
        let b = x8();
        assert_eq!(pi1_flag(&b, &b), Pi1::SimplyConnected);
        let cat = builtin_catalog();
        let x6 = find_block(&cat, "x6").unwrap();
        assert_eq!(x6.polarization.lattice().gram()[0][0], 6);
        assert_eq!(pi1_flag(&b, x6), Pi1::Finite);
    }

    #[test]
    fn neck_form_is_positive_and_flat() {
        let m = NeckModel::<Rational>::flat();
        let phi = neck_form(&m);
        assert!(is_positive(&phi));
        assert_eq!(metric_from_three_form(&phi).unwrap(), MetricTensor::euclidean());
    }

    #[test]
    fn neck_form_matches_product_form_after_relabel() {
        // (t, θ, θ̃) ↦ (x3, x1, x2)
        let phi = neck_form(&NeckModel::<Rational>::flat());
        let mut a = vec![vec![Rational::from_i64(0); 7]; 7];
        a[0][2] = Rational::from_i64(1);
        a[1][0] = Rational::from_i64(1);
        a[2][1] = Rational::from_i64(1);
        for i in 3..7 {
            a[i][i] = Rational::from_i64(1);
        }
        assert_eq!(phi.pullback(&a), standard_phi0());
    }

    #[test]
    fn gluing_preserves_matched_triples() {
        let m = NeckModel::<Rational>::flat();
        assert!(gluing_pullback_check(&m, &m.rotated()).preserved);
        let bad = gluing_pullback_check(&m, &m.rotated_without_negation());
        assert!(!bad.preserved);
        assert_eq!(bad.max_coefficient, 2.0);
        let phi = neck_form(&m);
        let f = gluing_matrix::<Rational>();
        assert_eq!(phi.pullback(&f).pullback(&f), phi);
    }

    #[test]
    fn su3_examples() {
        let (w, re) = standard_su3::<Rational>();
        let phi = su3_product_form(&w, &re).unwrap();
        assert_eq!(phi, standard_phi0());
        assert!(su3_product_form(&KForm::zero(2), &re).is_err());
    }

    #[test]
    fn catalog_round_trip() {
        let c = builtin_catalog();
        let back = catalog_from_json(&catalog_to_json(&c)).unwrap();
        assert_eq!(back, c);
    }
}
