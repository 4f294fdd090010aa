//! Finite good covers as abstract nerves and Čech cochains over them.
//!
//! Overlaps carry no geometry: all local data live in the single global chart
//! ℝⁿ, restricted "by fiat" to the labels.  Values are either polynomial forms
//! or U(1)-valued functions exp(2πi·q) stored through their exponent q.

use super::CechError;
use crate::exterior::{Poly, PolyForm, Scalar};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// An abstract good cover: ambient dimension, ordered patch labels, and a
/// nerve given by strictly increasing tuples of label indices, closed under
/// taking subtuples.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize, Debug)]
#[serde(try_from = "CoverRepr", into = "CoverRepr")]
pub struct Cover {
    dim: usize,
    labels: Vec<String>,
    nerve: BTreeSet<Vec<usize>>,
}

#[derive(Serialize, Deserialize, Clone)]
struct CoverRepr {
    dim: usize,
    labels: Vec<String>,
    nerve: Vec<Vec<usize>>,
}

impl From<Cover> for CoverRepr {
    fn from(c: Cover) -> Self {
        CoverRepr {
            dim: c.dim,
            labels: c.labels,
            nerve: c.nerve.into_iter().collect(),
        }
    }
}

impl TryFrom<CoverRepr> for Cover {
    type Error = CechError;
    fn try_from(r: CoverRepr) -> Result<Self, CechError> {
        Cover::build(r.dim, r.labels, r.nerve)
    }
}

impl Cover {
    /// Validate and build a cover.  Singleton patches are implied members of
    /// the nerve; every declared tuple must be strictly increasing, in range,
    /// and have all of its subtuples present.
    pub fn build(
        dim: usize,
        labels: Vec<String>,
        nerve: Vec<Vec<usize>>,
    ) -> Result<Self, CechError> {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for a in 0..labels.len() {
            set.insert(vec![a]);
        }
        for t in &nerve {
            if t.is_empty() || t.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CechError::InvalidNerve {
                    detail: format!("tuple {t:?} is not strictly increasing"),
                });
            }
            if *t.last().unwrap() >= labels.len() {
                return Err(CechError::InvalidNerve {
                    detail: format!("tuple {t:?} references a missing label"),
                });
            }
            set.insert(t.clone());
        }
        // closure under faces
        for t in &set {
            if t.len() < 2 {
                continue;
            }
            for j in 0..t.len() {
                let mut face = t.clone();
                face.remove(j);
                if !set.contains(&face) {
                    return Err(CechError::InvalidNerve {
                        detail: format!("face {face:?} of {t:?} missing from nerve"),
                    });
                }
            }
        }
        Ok(Cover {
            dim,
            labels,
            nerve: set,
        })
    }

    /// Single-patch cover of ℝⁿ.
    pub fn single_patch(dim: usize) -> Self {
        Cover::build(dim, vec!["u".into()], vec![]).expect("single patch cover is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.nerve.contains(simplex)
    }

    /// All Čech-degree-k simplices, i.e. (k+1)-tuples, in canonical order.
    pub fn simplices(&self, k: usize) -> Vec<Vec<usize>> {
        self.nerve
            .iter()
            .filter(|t| t.len() == k + 1)
            .cloned()
            .collect()
    }

    pub fn max_cech_degree(&self) -> usize {
        self.nerve.iter().map(|t| t.len() - 1).max().unwrap_or(0)
    }
}

/// A U(1)-valued function exp(2πi·q(x)), stored through its exponent.
/// Two functions are equal iff the exponents differ by an integer constant.
#[derive(Clone, Serialize, Deserialize)]
pub struct U1Function {
    pub exponent: Poly,
}

impl U1Function {
    pub fn one(dim: usize) -> Self {
        U1Function {
            exponent: Poly::zero(dim),
        }
    }

    pub fn from_exponent(exponent: Poly) -> Self {
        U1Function { exponent }
    }

    pub fn dim(&self) -> usize {
        self.exponent.dim()
    }

    pub fn mul(&self, rhs: &U1Function) -> Self {
        U1Function {
            exponent: &self.exponent + &rhs.exponent,
        }
    }

    pub fn inverse(&self) -> Self {
        U1Function {
            exponent: -&self.exponent,
        }
    }

    /// dlog(exp(2πi·q)) = 2πi·dq, as an exact 1-form.
    pub fn dlog(&self) -> PolyForm {
        PolyForm::from_poly(self.exponent.clone())
            .d()
            .scale(&Scalar::two_pi_i())
    }

    /// The constant function 1, up to the integer-winding ambiguity.
    pub fn is_one(&self) -> bool {
        self.exponent.is_constant() && self.exponent.constant_term().is_integer_constant()
    }

    pub fn equals(&self, rhs: &U1Function) -> bool {
        let diff = &self.exponent - &rhs.exponent;
        diff.is_constant() && diff.constant_term().is_integer_constant()
    }

    pub fn eval_f64(&self, x: &[f64]) -> Complex64 {
        (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * self.exponent.eval_f64(x)).exp()
    }
}

impl PartialEq for U1Function {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl fmt::Debug for U1Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp(2πi·[{:?}])", self.exponent)
    }
}

/// The two value kinds a cochain can carry.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ValueKind {
    U1,
    Form { degree: usize },
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CochainValue {
    U1(U1Function),
    Form(PolyForm),
}

impl CochainValue {
    fn matches(&self, kind: &ValueKind, dim: usize) -> bool {
        match (self, kind) {
            (CochainValue::U1(u), ValueKind::U1) => u.dim() == dim,
            (CochainValue::Form(a), ValueKind::Form { degree }) => {
                a.dim() == dim && a.degree() == *degree
            }
            _ => false,
        }
    }

    pub fn as_form(&self) -> &PolyForm {
        match self {
            CochainValue::Form(a) => a,
            CochainValue::U1(_) => panic!("expected form value"),
        }
    }

    pub fn as_u1(&self) -> &U1Function {
        match self {
            CochainValue::U1(u) => u,
            CochainValue::Form(_) => panic!("expected U(1) value"),
        }
    }

    fn is_trivial(&self) -> bool {
        match self {
            CochainValue::U1(u) => u.is_one(),
            CochainValue::Form(a) => a.is_zero(),
        }
    }
}

/// A Čech k-cochain over a cover, valued per (k+1)-simplex.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CechCochain {
    pub cover: Cover,
    pub k: usize,
    pub value_kind: ValueKind,
    entries: BTreeMap<Vec<usize>, CochainValue>,
}

impl CechCochain {
    pub fn new(
        cover: Cover,
        k: usize,
        value_kind: ValueKind,
        entries: BTreeMap<Vec<usize>, CochainValue>,
    ) -> Result<Self, CechError> {
        let expected = cover.simplices(k);
        for s in &expected {
            if !entries.contains_key(s) {
                return Err(CechError::InvalidCochain {
                    detail: format!("missing value on simplex {s:?}"),
                });
            }
        }
        for (s, v) in &entries {
            if s.len() != k + 1 || !cover.contains(s) {
                return Err(CechError::InvalidCochain {
                    detail: format!("simplex {s:?} not a degree-{k} simplex of the nerve"),
                });
            }
            if !v.matches(&value_kind, cover.dim()) {
                return Err(CechError::InvalidCochain {
                    detail: format!("value on {s:?} has the wrong kind or dimension"),
                });
            }
        }
        Ok(CechCochain {
            cover,
            k,
            value_kind,
            entries,
        })
    }

    pub fn zero(cover: Cover, k: usize, value_kind: ValueKind) -> Self {
        let dim = cover.dim();
        let entries = cover
            .simplices(k)
            .into_iter()
            .map(|s| {
                let v = match &value_kind {
                    ValueKind::U1 => CochainValue::U1(U1Function::one(dim)),
                    ValueKind::Form { degree } => CochainValue::Form(PolyForm::zero(dim, *degree)),
                };
                (s, v)
            })
            .collect();
        CechCochain {
            cover,
            k,
            value_kind,
            entries,
        }
    }

    pub fn value(&self, simplex: &[usize]) -> &CochainValue {
        &self.entries[simplex]
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &CochainValue)> {
        self.entries.iter()
    }

    /// True iff every entry is trivial (zero form / constant-1 function).
    pub fn is_trivial(&self) -> bool {
        self.entries.values().all(CochainValue::is_trivial)
    }

    fn check_compatible(&self, rhs: &CechCochain) -> Result<(), CechError> {
        if self.cover != rhs.cover {
            return Err(CechError::CoverMismatch);
        }
        if self.k != rhs.k || self.value_kind != rhs.value_kind {
            return Err(CechError::InvalidCochain {
                detail: "cochain degree or value kind mismatch".into(),
            });
        }
        Ok(())
    }

    /// Pointwise combination: forms add, U(1) values multiply.
    pub fn combine(&self, rhs: &CechCochain) -> Result<CechCochain, CechError> {
        self.check_compatible(rhs)?;
        let entries = self
            .entries
            .iter()
            .map(|(s, v)| {
                let w = rhs.value(s);
                let out = match (v, w) {
                    (CochainValue::U1(a), CochainValue::U1(b)) => CochainValue::U1(a.mul(b)),
                    (CochainValue::Form(a), CochainValue::Form(b)) => CochainValue::Form(a + b),
                    _ => unreachable!("kinds checked"),
                };
                (s.clone(), out)
            })
            .collect();
        Ok(CechCochain {
            cover: self.cover.clone(),
            k: self.k,
            value_kind: self.value_kind.clone(),
            entries,
        })
    }

    /// Pointwise inverse: forms negate, U(1) values invert.
    pub fn invert(&self) -> CechCochain {
        let entries = self
            .entries
            .iter()
            .map(|(s, v)| {
                let out = match v {
                    CochainValue::U1(a) => CochainValue::U1(a.inverse()),
                    CochainValue::Form(a) => CochainValue::Form(-a),
                };
                (s.clone(), out)
            })
            .collect();
        CechCochain {
            cover: self.cover.clone(),
            k: self.k,
            value_kind: self.value_kind.clone(),
            entries,
        }
    }

    /// The Čech coboundary δ̌, built from alternating face maps:
    /// (δ̌c)_{a₀…a_{k+1}} = Σ_j (−1)ʲ c_{a₀…âⱼ…a_{k+1}}.
    pub fn delta(&self) -> CechCochain {
        let dim = self.cover.dim();
        let entries = self
            .cover
            .simplices(self.k + 1)
            .into_iter()
            .map(|s| {
                let v = match &self.value_kind {
                    ValueKind::U1 => {
                        let mut q = Poly::zero(dim);
                        for j in 0..s.len() {
                            let mut face = s.clone();
                            face.remove(j);
                            let e = &self.value(&face).as_u1().exponent;
                            q = if j % 2 == 0 { &q + e } else { &q - e };
                        }
                        CochainValue::U1(U1Function::from_exponent(q))
                    }
                    ValueKind::Form { degree } => {
                        let mut a = PolyForm::zero(dim, *degree);
                        for j in 0..s.len() {
                            let mut face = s.clone();
                            face.remove(j);
                            let f = self.value(&face).as_form();
                            a = if j % 2 == 0 { &a + f } else { &a - f };
                        }
                        CochainValue::Form(a)
                    }
                };
                (s, v)
            })
            .collect();
        CechCochain {
            cover: self.cover.clone(),
            k: self.k + 1,
            value_kind: self.value_kind.clone(),
            entries,
        }
    }

    /// Entrywise exterior derivative; U(1) cochains map to their dlog 1-forms.
    pub fn d(&self) -> CechCochain {
        let (kind, entries): (ValueKind, BTreeMap<_, _>) = match &self.value_kind {
            ValueKind::U1 => (
                ValueKind::Form { degree: 1 },
                self.entries
                    .iter()
                    .map(|(s, v)| (s.clone(), CochainValue::Form(v.as_u1().dlog())))
                    .collect(),
            ),
            ValueKind::Form { degree } => (
                ValueKind::Form { degree: degree + 1 },
                self.entries
                    .iter()
                    .map(|(s, v)| (s.clone(), CochainValue::Form(v.as_form().d())))
                    .collect(),
            ),
        };
        CechCochain {
            cover: self.cover.clone(),
            k: self.k,
            value_kind: kind,
            entries,
        }
    }
}

pub fn cech_delta(c: &CechCochain) -> CechCochain {
    c.delta()
}
