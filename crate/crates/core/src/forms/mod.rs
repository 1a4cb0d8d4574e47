//! Exterior algebra on R^7: the standard G2 form, positivity, the induced
//! metric, Hodge star, pullback and the exterior derivative of sampled fields.

mod field;
mod kform;
mod metric;

pub use field::{exterior_derivative, FormField, Grid};
pub(crate) use kform::{mask_index, masks, merge_sign};
pub use kform::{binomial7, euclidean_volume, mask_axes, parse_label, standard_phi0, KForm, DIM};
pub use metric::{b_matrix, hodge_star, is_positive, metric_from_three_form, MetricTensor};

use serde_json::{Map, Value};

use crate::scalar::{Domain, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormError {
    #[error("degree {0} exceeds 7")]
    DegreeOverflow(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("degree {degree} needs C(7,{degree}) coefficients, got {got}")]
    CoefficientCount { degree: usize, got: usize },
    #[error("invalid index tuple {0}")]
    BadIndex(String),
    #[error("cannot combine exact and real forms")]
    DomainMismatch,
    #[error("3-form is not positive")]
    NotPositive,
    #[error("metric normalization is irrational; use the real domain")]
    NotRepresentable,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("shape mismatch")]
    Shape,
    #[error("axis {axis} has resolution {resolution}; active axes need at least 4")]
    GridTooCoarse { axis: usize, resolution: usize },
    #[error("malformed form JSON: {0}")]
    Json(String),
}

/// A form whose coefficient domain is only known at runtime (parsed input).
#[derive(Clone, Debug, PartialEq)]
pub enum DynForm {
    Exact(KForm<Rational>),
    Real(KForm<f64>),
}

impl DynForm {
    pub fn domain(&self) -> Domain {
        match self {
            DynForm::Exact(_) => Domain::Exact,
            DynForm::Real(_) => Domain::Real,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            DynForm::Exact(f) => f.degree(),
            DynForm::Real(f) => f.degree(),
        }
    }

    pub fn wedge(&self, other: &DynForm) -> Result<DynForm, FormError> {
        match (self, other) {
            (DynForm::Exact(a), DynForm::Exact(b)) => Ok(DynForm::Exact(a.wedge(b)?)),
            (DynForm::Real(a), DynForm::Real(b)) => Ok(DynForm::Real(a.wedge(b)?)),
            _ => Err(FormError::DomainMismatch),
        }
    }

    pub fn add(&self, other: &DynForm) -> Result<DynForm, FormError> {
        match (self, other) {
            (DynForm::Exact(a), DynForm::Exact(b)) => Ok(DynForm::Exact(a.add(b)?)),
            (DynForm::Real(a), DynForm::Real(b)) => Ok(DynForm::Real(a.add(b)?)),
            _ => Err(FormError::DomainMismatch),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            DynForm::Exact(f) => is_positive(f),
            DynForm::Real(f) => is_positive(f),
        }
    }

    pub fn to_real(&self) -> KForm<f64> {
        match self {
            DynForm::Exact(f) => f.to_real(),
            DynForm::Real(f) => f.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            DynForm::Exact(f) => form_to_json(f),
            DynForm::Real(f) => form_to_json(f),
        }
    }

    /// Parses `{"degree": k, "coeffs": {"1,2,3": "p/q" | number}}`. The form is
    /// exact when every coefficient is a string or an integer, unless a
    /// `"domain"` field says otherwise.
    pub fn from_json(v: &Value) -> Result<DynForm, FormError> {
        let obj = v.as_object().ok_or_else(|| FormError::Json("expected an object".into()))?;
        let coeffs = match obj.get("coeffs") {
            None => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(FormError::Json("coeffs must be an object".into())),
        };
        let domain = match obj.get("domain").and_then(Value::as_str) {
            Some("exact") => Domain::Exact,
            Some("real") => Domain::Real,
            Some(other) => return Err(FormError::Json(format!("unknown domain {other}"))),
            None => {
                if coeffs.values().all(|c| c.is_string() || c.is_i64()) {
                    Domain::Exact
                } else {
                    Domain::Real
                }
            }
        };
        match domain {
            Domain::Exact => Ok(DynForm::Exact(form_from_json(v)?)),
            Domain::Real => Ok(DynForm::Real(form_from_json(v)?)),
        }
    }
}

/// Serializes with 1-based comma-separated keys; zero slots are omitted.
pub fn form_to_json<T: Scalar>(f: &KForm<T>) -> Value {
    let mut coeffs = Map::new();
    for (axes, c) in f.terms() {
        let key = axes.iter().map(|a| (a + 1).to_string()).collect::<Vec<_>>().join(",");
        coeffs.insert(key, c.to_json());
    }
    let domain = match T::DOMAIN {
        Domain::Exact => "exact",
        Domain::Real => "real",
    };
    serde_json::json!({ "degree": f.degree(), "domain": domain, "coeffs": coeffs })
}

pub fn form_from_json<T: Scalar>(v: &Value) -> Result<KForm<T>, FormError> {
    let degree = v
        .get("degree")
        .and_then(Value::as_u64)
        .ok_or_else(|| FormError::Json("missing integer degree".into()))? as usize;
    if degree > DIM {
        return Err(FormError::DegreeOverflow(degree));
    }
    let mut f = KForm::zero(degree);
    if let Some(Value::Object(m)) = v.get("coeffs") {
        for (key, c) in m {
            let axes = parse_label(key)?;
            if axes.len() != degree {
                return Err(FormError::BadIndex(key.clone()));
            }
            let value = T::from_json(c).map_err(|e| FormError::Json(format!("{key}: {e}")))?;
            f.set_coeff(&axes, value)?;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    type Q = Rational;

    #[test]
    fn phi0_evaluations() {
        let phi: KForm<Q> = standard_phi0();
        let e = |i: usize| {
            let mut v = vec![rat(0, 1); 7];
            v[i - 1] = rat(1, 1);
            v
        };
        assert_eq!(phi.evaluate(&[e(1), e(2), e(3)]).unwrap(), rat(1, 1));
        assert_eq!(phi.evaluate(&[e(2), e(5), e(7)]).unwrap(), rat(-1, 1));
        assert_eq!(phi.evaluate(&[e(1), e(2), e(4)]).unwrap(), rat(0, 1));
        assert_eq!(phi.evaluate(&[e(3), e(2), e(1)]).unwrap(), rat(-1, 1));
        assert_eq!(phi.support_len(), 7);
    }

    #[test]
    fn wedge_basics() {
        let a = KForm::<Q>::dx(0).wedge(&KForm::dx(1)).unwrap();
        assert_eq!(a, KForm::from_terms(2, &[("12", 1)]).unwrap());
        let b = KForm::<Q>::dx(1).wedge(&KForm::dx(0)).unwrap();
        assert_eq!(b, a.neg());
        let phi: KForm<Q> = standard_phi0();
        assert!(phi.wedge(&phi).unwrap().is_zero());
        let psi = phi.wedge(&KForm::dx(0)).unwrap().wedge(&KForm::dx(1)).unwrap();
        assert_eq!(psi.wedge(&phi), Err(FormError::DegreeOverflow(8)));
    }

    #[test]
    fn interior_of_basis() {
        let phi: KForm<Q> = standard_phi0();
        let i1 = phi.contract_axis(0);
        assert_eq!(i1, KForm::from_terms(2, &[("23", 1), ("45", 1), ("67", 1)]).unwrap());
    }

    #[test]
    fn metric_of_phi0_and_scaled() {
        let phi: KForm<Q> = standard_phi0();
        let g = metric_from_three_form(&phi).unwrap();
        assert_eq!(g, MetricTensor::euclidean());
        let g8 = metric_from_three_form(&phi.scale(&rat(8, 1))).unwrap();
        assert_eq!(g8.entries[0][0], rat(4, 1));
        assert_eq!(g8.volume, rat(128, 1));
        let neg = metric_from_three_form(&phi.neg()).unwrap();
        assert_eq!(neg.orientation, -1);
        assert_eq!(neg.entries, g.entries);
        assert_eq!(metric_from_three_form(&phi.scale(&rat(2, 1))), Err(FormError::NotRepresentable));
        assert!(is_positive(&phi.scale(&rat(2, 1))));
    }

    #[test]
    fn degenerate_forms_not_positive() {
        let d123 = KForm::<Q>::from_terms(3, &[("123", 1)]).unwrap();
        assert_eq!(metric_from_three_form(&d123), Err(FormError::NotPositive));
        assert!(!is_positive(&KForm::<Q>::zero(3)));
        assert!(!is_positive(&KForm::<f64>::zero(3)));
    }

    #[test]
    fn json_round_trip() {
        let phi: KForm<Q> = standard_phi0();
        let v = form_to_json(&phi);
        assert_eq!(v["coeffs"]["2,5,7"], Value::String("-1".into()));
        assert_eq!(DynForm::from_json(&v).unwrap(), DynForm::Exact(phi.clone()));
        let real = DynForm::from_json(&serde_json::json!({"degree": 1, "coeffs": {"3": 0.5}})).unwrap();
        assert_eq!(real.domain(), Domain::Real);
        assert_eq!(DynForm::Exact(phi).wedge(&real), Err(FormError::DomainMismatch));
        assert!(DynForm::from_json(&serde_json::json!({"degree": 2, "coeffs": {"1,1": "1"}})).is_err());
    }
}
