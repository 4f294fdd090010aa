//! The Deligne complex in degree n over a fixed cover.
//!
//! A k-cochain has components c_j for j = 0..min(k,n): c_0 is U(1)-valued of
//! Čech degree k, and c_j is a (form-degree j)-valued cochain of Čech degree
//! k−j.  The differential is the graded sum of the Čech coboundary and the de
//! Rham differential,
//!
//! ```text
//! (Dc)_0 = −δ̌c_0,     (Dc)_j = (−1)^{j+1} (δ̌c_j + d c_{j−1}),
//! ```
//!
//! with d c_0 understood as dlog and components truncated above form degree n.
//! The slot signs are forced by the face-map convention of `cech`: with them
//! D² = 0 holds exactly and the familiar local relations (A_a − A_b = dlog f,
//! δ̌A = −dlog g, B_a − B_b = dA_ab) are precisely the cocycle conditions.

use super::cech::{CechCochain, CochainValue, Cover, ValueKind};
use super::CechError;
use crate::exterior::PolyForm;
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct DeligneCochain {
    /// Degree n of the complex (top form degree).
    pub n: usize,
    /// Čech degree k of this cochain.
    pub k: usize,
    pub components: Vec<CechCochain>,
}

/// One violated relation in a cocycle check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Residual {
    pub component: usize,
    pub simplex: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CocycleReport {
    pub ok: bool,
    pub residuals: Vec<Residual>,
}

impl DeligneCochain {
    pub fn new(n: usize, k: usize, components: Vec<CechCochain>) -> Result<Self, CechError> {
        let expected = k.min(n) + 1;
        if components.len() != expected {
            return Err(CechError::InvalidCochain {
                detail: format!(
                    "degree-{n} complex: a Čech-degree-{k} cochain needs {expected} components, got {}",
                    components.len()
                ),
            });
        }
        let cover = components[0].cover.clone();
        for (j, c) in components.iter().enumerate() {
            if c.cover != cover {
                return Err(CechError::CoverMismatch);
            }
            let want_kind = if j == 0 {
                ValueKind::U1
            } else {
                ValueKind::Form { degree: j }
            };
            if c.value_kind != want_kind || c.k != k - j {
                return Err(CechError::InvalidCochain {
                    detail: format!(
                        "component {j} must be {want_kind:?} of Čech degree {}",
                        k - j
                    ),
                });
            }
        }
        Ok(DeligneCochain { n, k, components })
    }

    pub fn cover(&self) -> &Cover {
        &self.components[0].cover
    }

    pub fn zero(cover: Cover, n: usize, k: usize) -> Self {
        let components = (0..=k.min(n))
            .map(|j| {
                let kind = if j == 0 {
                    ValueKind::U1
                } else {
                    ValueKind::Form { degree: j }
                };
                CechCochain::zero(cover.clone(), k - j, kind)
            })
            .collect();
        DeligneCochain { n, k, components }
    }

    /// Componentwise combination (tensor of the underlying geometric data).
    pub fn combine(&self, rhs: &DeligneCochain) -> Result<DeligneCochain, CechError> {
        if self.n != rhs.n || self.k != rhs.k {
            return Err(CechError::InvalidCochain {
                detail: "combining cochains of different degrees".into(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&rhs.components)
            .map(|(a, b)| a.combine(b))
            .collect::<Result<_, _>>()?;
        Ok(DeligneCochain {
            n: self.n,
            k: self.k,
            components,
        })
    }

    /// Componentwise inverse (dual of the underlying geometric data).
    pub fn invert(&self) -> DeligneCochain {
        DeligneCochain {
            n: self.n,
            k: self.k,
            components: self.components.iter().map(CechCochain::invert).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.components.iter().all(CechCochain::is_trivial)
    }
}

pub fn deligne_delta(c: &DeligneCochain) -> DeligneCochain {
    let n = c.n;
    let k = c.k;
    let mut components = Vec::new();
    for j in 0..=(k + 1).min(n) {
        let cech_part = if j <= k.min(n) {
            Some(c.components[j].delta())
        } else {
            None
        };
        let derham_part = if j >= 1 && j - 1 <= k.min(n) {
            Some(c.components[j - 1].d())
        } else {
            None
        };
        let sum = match (cech_part, derham_part) {
            (Some(a), Some(b)) => a.combine(&b).expect("degrees align by construction"),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!("every slot has at least one contribution"),
        };
        // slot sign (−1)^{j+1}
        components.push(if j % 2 == 0 { sum.invert() } else { sum });
    }
    DeligneCochain {
        n,
        k: k + 1,
        components,
    }
}

pub fn is_deligne_cocycle(c: &DeligneCochain) -> CocycleReport {
    let delta = deligne_delta(c);
    let mut residuals = Vec::new();
    for (j, comp) in delta.components.iter().enumerate() {
        for (s, v) in comp.entries() {
            let bad = match v {
                CochainValue::U1(u) => !u.is_one(),
                CochainValue::Form(a) => !a.is_zero(),
            };
            if bad {
                residuals.push(Residual {
                    component: j,
                    simplex: s.clone(),
                    detail: format!("{v:?}"),
                });
            }
        }
    }
    CocycleReport {
        ok: residuals.is_empty(),
        residuals,
    }
}

/// Shift a cocycle by the coboundary of a (k−1)-cochain h: c ↦ c · D h.
pub fn gauge_shift(c: &DeligneCochain, h: &DeligneCochain) -> Result<DeligneCochain, CechError> {
    if c.cover() != h.cover() {
        return Err(CechError::CoverMismatch);
    }
    if h.n != c.n || c.k == 0 || h.k != c.k - 1 {
        return Err(CechError::InvalidCochain {
            detail: format!(
                "gauge parameter must have Čech degree {} in the degree-{} complex",
                c.k.max(1) - 1,
                c.n
            ),
        });
    }
    c.combine(&deligne_delta(h))
}

/// The curvature of a cocycle class: the global (n+1)-form assembled patchwise
/// from d of the top component.  Only defined for k ≤ n (for k = n this is the
/// curvature form of the classified geometric object).
pub fn curv_of_class(c: &DeligneCochain) -> Result<PolyForm, CechError> {
    let report = is_deligne_cocycle(c);
    if !report.ok {
        return Err(CechError::NotACocycle {
            residuals: report.residuals,
        });
    }
    if c.k > c.n {
        return Err(CechError::InvalidCochain {
            detail: format!("curvature needs Čech degree ≤ complex degree, got k={} > n={}", c.k, c.n),
        });
    }
    let top = c.components.last().expect("nonempty components");
    debug_assert_eq!(top.k, 0);
    let dim = c.cover().dim();
    let mut candidate: Option<(Vec<usize>, PolyForm)> = None;
    for (s, v) in top.d().entries() {
        let beta = v.as_form().clone();
        match &candidate {
            None => candidate = Some((s.clone(), beta)),
            Some((s0, b0)) => {
                if *b0 != beta {
                    return Err(CechError::InconsistentPatches {
                        detail: format!(
                            "patch {s:?} disagrees with patch {s0:?} about the curvature"
                        ),
                    });
                }
            }
        }
    }
    let beta = candidate
        .map(|(_, b)| b)
        .unwrap_or_else(|| PolyForm::zero(dim, c.k + 1));
    debug_assert!(beta.d().is_zero());
    Ok(beta)
}

/// Project a cocycle onto its U(1) component (the Čech k-cocycle g).
pub fn dd_projection(c: &DeligneCochain) -> Result<CechCochain, CechError> {
    let report = is_deligne_cocycle(c);
    if !report.ok {
        return Err(CechError::NotACocycle {
            residuals: report.residuals,
        });
    }
    Ok(c.components[0].clone())
}
