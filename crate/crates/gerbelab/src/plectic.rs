//! Multisymplectic spaces on ℝⁿ, Hamiltonian forms and vector fields, the
//! observable bracket with its Jacobiator, and the prequantum check.

use crate::exterior::fraction::{FracMatrix, ScalarFrac};
use crate::exterior::{Poly, PolyForm, Scalar, VectorField};
use crate::gerbe::LocalGerbe;
use crate::rng::{seeded_rng, small_rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum PlecticError {
    #[error("the multisymplectic form is not closed")]
    NotClosed,
    #[error("degenerate structure: {detail}")]
    Degenerate { detail: String },
    #[error("no polynomial Hamiltonian vector field exists for this form")]
    NotHamiltonian,
    #[error("the form is not invariant along direction {direction}")]
    NotInvariant { direction: usize },
    #[error("curvature does not match −2πi·ω")]
    Mismatch { difference: PolyForm },
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
}

/// A closed nondegenerate (p+1)-form on ℝⁿ, validated on construction.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(try_from = "PlecticRepr", into = "PlecticRepr")]
pub struct PlecticSpace {
    omega: PolyForm,
}

#[derive(Serialize, Deserialize, Clone)]
struct PlecticRepr {
    dim: usize,
    omega: PolyForm,
}

impl From<PlecticSpace> for PlecticRepr {
    fn from(p: PlecticSpace) -> Self {
        PlecticRepr {
            dim: p.omega.dim(),
            omega: p.omega,
        }
    }
}

impl TryFrom<PlecticRepr> for PlecticSpace {
    type Error = PlecticError;
    fn try_from(r: PlecticRepr) -> Result<Self, PlecticError> {
        if r.omega.dim() != r.dim {
            return Err(PlecticError::DimensionMismatch {
                detail: "declared dimension does not match the form".into(),
            });
        }
        make_plectic(r.omega)
    }
}

/// An observable 1-cell: a Hamiltonian 1-form α together with a function f.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Observable {
    pub alpha: PolyForm,
    pub f: Poly,
}

impl Observable {
    pub fn from_form(alpha: PolyForm) -> Self {
        let f = Poly::zero(alpha.dim());
        Observable { alpha, f }
    }
}

/// The matrix of the contraction X ↦ ι_Xω at exact coefficients, with rows
/// indexed by the canonical p-tuples and columns by the n directions; entries
/// are the coefficient polynomials of ι_{∂_i}ω.
fn contraction_columns(omega: &PolyForm) -> Vec<PolyForm> {
    (0..omega.dim())
        .map(|i| {
            omega
                .interior_product(&VectorField::coordinate(omega.dim(), i))
                .expect("degree ≥ 1 by construction")
        })
        .collect()
}

/// All strictly increasing index tuples of length `len` in `0..dim`.
fn tuples(dim: usize, len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(dim: usize, len: usize, start: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i as u8);
            rec(dim, len, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(dim, len, 0, &mut cur, &mut out);
    out
}

/// Validate ω: closedness exactly, nondegeneracy exactly for constant
/// coefficients and at 8 seeded rational sample points otherwise.
pub fn make_plectic(omega: PolyForm) -> Result<PlecticSpace, PlecticError> {
    if omega.degree() < 2 {
        return Err(PlecticError::Degenerate {
            detail: "a multisymplectic form must have degree at least 2".into(),
        });
    }
    if omega.degree() > omega.dim() {
        return Err(PlecticError::Degenerate {
            detail: "form degree exceeds the ambient dimension".into(),
        });
    }
    if !omega.d().is_zero() {
        return Err(PlecticError::NotClosed);
    }
    let cols = contraction_columns(&omega);
    let rows = tuples(omega.dim(), omega.degree() - 1);
    let constant = omega.terms().all(|(_, p)| p.is_constant());
    let check_at = |point: Option<&[crate::exterior::Rat]>| -> bool {
        let mut m = FracMatrix::zero(rows.len(), cols.len());
        for (r, tup) in rows.iter().enumerate() {
            for (c, col) in cols.iter().enumerate() {
                let p = col.coefficient(tup);
                let s = match point {
                    None => p.constant_term(),
                    Some(x) => p.eval_rational(x),
                };
                m.set(r, c, ScalarFrac::from_scalar(s));
            }
        }
        m.nullspace().is_empty()
    };
    if constant {
        if !check_at(None) {
            return Err(PlecticError::Degenerate {
                detail: "a constant vector lies in the kernel of ι_•ω".into(),
            });
        }
    } else {
        let mut rng = seeded_rng(0x11EC);
        for _ in 0..8 {
            let x: Vec<_> = (0..omega.dim()).map(|_| small_rational(&mut rng)).collect();
            if !check_at(Some(&x)) {
                return Err(PlecticError::Degenerate {
                    detail: "kernel detected at a sampled point".into(),
                });
            }
        }
    }
    Ok(PlecticSpace { omega })
}

impl PlecticSpace {
    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn omega(&self) -> &PolyForm {
        &self.omega
    }

    /// Solve ι_Xω = −dh for a polynomial X.  `h` must have degree
    /// deg ω − 2 (a Hamiltonian 1-form in the 2-plectic case, a function in
    /// the symplectic case).
    pub fn hamiltonian_vf(&self, h: &PolyForm) -> Result<VectorField, PlecticError> {
        let n = self.dim();
        if h.dim() != n || h.degree() + 2 != self.omega.degree() {
            return Err(PlecticError::DimensionMismatch {
                detail: format!(
                    "Hamiltonian form must be a degree-{} form on ℝ{}",
                    self.omega.degree() - 2,
                    n
                ),
            });
        }
        let rhs = -&h.d();
        let cols = contraction_columns(&self.omega);
        let rows = tuples(n, self.omega.degree() - 1);
        let constant = self.omega.terms().all(|(_, p)| p.is_constant());
        let x = if constant {
            self.solve_constant_omega(&cols, &rows, &rhs)?
        } else {
            self.solve_general_omega(&cols, &rows, h, &rhs)?
        };
        // re-verify the defining equation symbolically
        let check = self
            .omega
            .interior_product(&x)
            .expect("degree ≥ 1")
            .clone();
        if &check + &h.d() != PolyForm::zero(n, self.omega.degree() - 1) {
            return Err(PlecticError::NotHamiltonian);
        }
        Ok(x)
    }

    /// Constant ω decouples monomial by monomial: for every monomial of the
    /// right-hand side solve one small constant system.
    fn solve_constant_omega(
        &self,
        cols: &[PolyForm],
        rows: &[Vec<u8>],
        rhs: &PolyForm,
    ) -> Result<VectorField, PlecticError> {
        let n = self.dim();
        // collect rhs coefficients per monomial: monomial -> row vector
        let mut per_monomial: BTreeMap<Vec<u32>, Vec<Scalar>> = BTreeMap::new();
        for (r, tup) in rows.iter().enumerate() {
            for (e, c) in rhs.coefficient(tup).terms() {
                per_monomial
                    .entry(e.clone())
                    .or_insert_with(|| vec![Scalar::zero(); rows.len()])[r] = c.clone();
            }
        }
        let mut comps = vec![Poly::zero(n); n];
        for (e, b) in per_monomial {
            let mut m = FracMatrix::zero(rows.len(), n);
            for (r, tup) in rows.iter().enumerate() {
                for (c, col) in cols.iter().enumerate() {
                    m.set(
                        r,
                        c,
                        ScalarFrac::from_scalar(col.coefficient(tup).constant_term()),
                    );
                }
            }
            let b: Vec<ScalarFrac> = b.into_iter().map(ScalarFrac::from_scalar).collect();
            let sol = m.solve(&b).ok_or(PlecticError::NotHamiltonian)?;
            for (i, v) in sol.into_iter().enumerate() {
                let s = v.as_polynomial().ok_or(PlecticError::NotHamiltonian)?;
                comps[i].add_term(e.clone(), s);
            }
        }
        Ok(VectorField::new(comps))
    }

    /// General polynomial ω: one exact linear system over all unknown
    /// coefficients of X up to the documented degree bound.
    fn solve_general_omega(
        &self,
        cols: &[PolyForm],
        rows: &[Vec<u8>],
        h: &PolyForm,
        rhs: &PolyForm,
    ) -> Result<VectorField, PlecticError> {
        let n = self.dim();
        let omega_coeff_deg = self
            .omega
            .terms()
            .map(|(_, p)| p.total_degree())
            .max()
            .unwrap_or(0);
        let h_deg = h.terms().map(|(_, p)| p.total_degree()).max().unwrap_or(0);
        let bound = h_deg + omega_coeff_deg;
        let monomials = monomials_up_to(n, bound);
        let unknowns = n * monomials.len();
        // equations: for each row tuple and each result monomial up to
        // bound + omega_coeff_deg, match coefficients
        let eq_monomials = monomials_up_to(n, bound + omega_coeff_deg);
        let mut m = FracMatrix::zero(rows.len() * eq_monomials.len(), unknowns);
        let mut b = vec![ScalarFrac::zero(); rows.len() * eq_monomials.len()];
        let eq_index: BTreeMap<&Vec<u32>, usize> =
            eq_monomials.iter().enumerate().map(|(i, e)| (e, i)).collect();
        for (r, tup) in rows.iter().enumerate() {
            for (ci, col) in cols.iter().enumerate() {
                let p = col.coefficient(tup);
                for (mi, mono) in monomials.iter().enumerate() {
                    let unknown = ci * monomials.len() + mi;
                    for (e, c) in p.terms() {
                        let sum: Vec<u32> =
                            e.iter().zip(mono.iter()).map(|(a, b)| a + b).collect();
                        let row = r * eq_monomials.len() + eq_index[&sum];
                        let cur = m.at(row, unknown).clone();
                        m.set(row, unknown, cur.add(&ScalarFrac::from_scalar(c.clone())));
                    }
                }
            }
            for (e, c) in rhs.coefficient(tup).terms() {
                let row = r * eq_monomials.len() + eq_index[e];
                b[row] = ScalarFrac::from_scalar(c.clone());
            }
        }
        let sol = m.solve(&b).ok_or(PlecticError::NotHamiltonian)?;
        let mut comps = vec![Poly::zero(n); n];
        for ci in 0..n {
            for (mi, mono) in monomials.iter().enumerate() {
                let v = &sol[ci * monomials.len() + mi];
                if !v.is_zero() {
                    let s = v.as_polynomial().ok_or(PlecticError::NotHamiltonian)?;
                    comps[ci].add_term(mono.clone(), s);
                }
            }
        }
        Ok(VectorField::new(comps))
    }

    /// The semistrict bracket on Hamiltonian forms:
    /// [h₁, h₂] = −ι_{X₁}ι_{X₂}ω.
    pub fn bracket_forms(&self, h1: &PolyForm, h2: &PolyForm) -> Result<PolyForm, PlecticError> {
        let x1 = self.hamiltonian_vf(h1)?;
        let x2 = self.hamiltonian_vf(h2)?;
        let inner = self.omega.interior_product(&x2).expect("degree ≥ 2");
        Ok(-&inner.interior_product(&x1).expect("degree ≥ 1"))
    }

    /// Observable bracket [(α,f),(β,g)] = ([α,β], 0).
    pub fn bracket(&self, o1: &Observable, o2: &Observable) -> Result<Observable, PlecticError> {
        Ok(Observable::from_form(
            self.bracket_forms(&o1.alpha, &o2.alpha)?,
        ))
    }

    /// The Jacobiator 1-cell: ([α,[β,γ]], ι_{X_α}ι_{X_β}ι_{X_γ}ω), with the
    /// homotopy identity
    /// [[α,β],γ] + [β,[α,γ]] − [α,[β,γ]] = −d(ι_{X_α}ι_{X_β}ι_{X_γ}ω)
    /// holding exactly for Hamiltonian inputs.
    pub fn jacobiator(
        &self,
        alpha: &PolyForm,
        beta: &PolyForm,
        gamma: &PolyForm,
    ) -> Result<Observable, PlecticError> {
        let f = self.triple_contraction(alpha, beta, gamma)?;
        let nested = self.bracket_forms(alpha, &self.bracket_forms(beta, gamma)?)?;
        debug_assert!(
            self.homotopy_residual(alpha, beta, gamma).unwrap().is_zero(),
            "homotopy Jacobi identity violated"
        );
        Ok(Observable { alpha: nested, f })
    }

    /// ι_{X_α}ι_{X_β}ι_{X_γ}ω as a function.
    pub fn triple_contraction(
        &self,
        alpha: &PolyForm,
        beta: &PolyForm,
        gamma: &PolyForm,
    ) -> Result<Poly, PlecticError> {
        let xa = self.hamiltonian_vf(alpha)?;
        let xb = self.hamiltonian_vf(beta)?;
        let xc = self.hamiltonian_vf(gamma)?;
        let f = self
            .omega
            .interior_product(&xc)
            .and_then(|t| t.interior_product(&xb))
            .and_then(|t| t.interior_product(&xa))
            .expect("three contractions of a 3-form");
        Ok(f.as_poly())
    }

    /// Left side minus right side of the homotopy Jacobi identity
    /// [[α,β],γ] + [β,[α,γ]] − [α,[β,γ]] = −d(ι_{X_α}ι_{X_β}ι_{X_γ}ω);
    /// zero for Hamiltonian inputs.
    pub fn homotopy_residual(
        &self,
        alpha: &PolyForm,
        beta: &PolyForm,
        gamma: &PolyForm,
    ) -> Result<PolyForm, PlecticError> {
        let lhs = &(&self.bracket_forms(&self.bracket_forms(alpha, beta)?, gamma)?
            + &self.bracket_forms(beta, &self.bracket_forms(alpha, gamma)?)?)
            - &self.bracket_forms(alpha, &self.bracket_forms(beta, gamma)?)?;
        let rhs = PolyForm::from_poly(self.triple_contraction(alpha, beta, gamma)?).d();
        Ok(&lhs + &rhs)
    }

    /// Exact prequantum condition H = −2πi·ω against a gerbe's curvature.
    pub fn prequantum_check(&self, gerbe: &LocalGerbe) -> Result<(), PlecticError> {
        if gerbe.dim() != self.dim() {
            return Err(PlecticError::DimensionMismatch {
                detail: "gerbe and multisymplectic space have different dimensions".into(),
            });
        }
        if self.omega.degree() != gerbe.curvature_3form().degree() {
            return Err(PlecticError::DimensionMismatch {
                detail: "curvature degree does not match ω".into(),
            });
        }
        let diff = gerbe.curvature_3form() + &self.omega.scale(&Scalar::two_pi_i());
        if diff.is_zero() {
            Ok(())
        } else {
            Err(PlecticError::Mismatch { difference: diff })
        }
    }

    /// Dimensional reduction along a coordinate direction:
    /// ω_red = ι_{∂_k}ω on the quotient coordinates.
    pub fn reduce_dimension(&self, direction: usize) -> Result<PlecticSpace, PlecticError> {
        let n = self.dim();
        if direction >= n {
            return Err(PlecticError::DimensionMismatch {
                detail: "reduction direction out of range".into(),
            });
        }
        let invariant = self
            .omega
            .terms()
            .all(|(_, p)| p.independent_of(direction));
        if !invariant {
            return Err(PlecticError::NotInvariant { direction });
        }
        let contracted = self
            .omega
            .interior_product(&VectorField::coordinate(n, direction))
            .expect("degree ≥ 2");
        let reduced = contracted
            .drop_variable(direction)
            .expect("contracted form cannot contain the reduced direction");
        make_plectic(reduced)
    }

    /// Reduce an observable along `direction`: the symplectic shadow of (α,f)
    /// is the function ι_{∂_k}α on the quotient.
    pub fn reduce_observable(
        &self,
        o: &Observable,
        direction: usize,
    ) -> Result<PolyForm, PlecticError> {
        // Invariance means the coefficients do not vary along the direction; a
        // dx^k component is allowed (it is exactly what the contraction keeps).
        let invariant = o.alpha.terms().all(|(_, p)| p.independent_of(direction))
            && o.f.independent_of(direction);
        if !invariant {
            return Err(PlecticError::NotInvariant { direction });
        }
        let contracted = o
            .alpha
            .interior_product(&VectorField::coordinate(self.dim(), direction))
            .map_err(|_| PlecticError::DimensionMismatch {
                detail: "observable is not a 1-form".into(),
            })?;
        contracted
            .drop_variable(direction)
            .map_err(|_| PlecticError::NotInvariant { direction })
    }
}

fn monomials_up_to(n: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, bound, &mut cur, &mut out);
    out.sort();
    out
}

/// The closed-form ℝ³ Hamiltonian vector field for ω = vol:
/// Xⁱ = −ε^{ijk} ∂ⱼα_k.  Kept as an independent oracle for the linear solver.
pub fn hamiltonian_vf_eps_r3(alpha: &PolyForm) -> VectorField {
    assert_eq!(alpha.dim(), 3);
    assert_eq!(alpha.degree(), 1);
    let a = |k: usize| alpha.coefficient(&[k as u8]);
    let comp = |j: usize, k: usize| -&(&a(k).partial(j) - &a(j).partial(k));
    // X¹ = −(∂₂α₃ − ∂₃α₂), cyclically
    VectorField::new(vec![comp(1, 2), comp(2, 0), comp(0, 1)])
}

/// The closed-form ℝ³ bracket for ω = vol:
/// [α,β] = ε^{ijk} ∂ᵢα_k (∂ⱼβ_l − ∂_lβⱼ) dx^l.
pub fn bracket_eps_r3(alpha: &PolyForm, beta: &PolyForm) -> PolyForm {
    assert_eq!(alpha.dim(), 3);
    let a = |k: usize| alpha.coefficient(&[k as u8]);
    let b = |k: usize| beta.coefficient(&[k as u8]);
    let eps = |i: usize, j: usize, k: usize| -> i64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
            _ => 0,
        }
    };
    let mut out = PolyForm::zero(3, 1);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let e = eps(i, j, k);
                if e == 0 {
                    continue;
                }
                for l in 0..3 {
                    let term = &a(k).partial(i) * &(&b(l).partial(j) - &b(j).partial(l));
                    let term = if e < 0 { -&term } else { term };
                    out.add_term(vec![l as u8], term);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gerbe::{prequantum_rho, TrivialGerbe};

    fn vol3() -> PolyForm {
        PolyForm::term(3, vec![0, 1, 2], Poly::one(3))
    }

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    fn p_r3() -> PlecticSpace {
        make_plectic(vol3()).unwrap()
    }

    #[test]
    fn make_plectic_examples() {
        assert!(make_plectic(vol3()).is_ok());
        let area2 = PolyForm::term(2, vec![0, 1], Poly::one(2));
        assert!(make_plectic(area2).is_ok());
        // dx¹∧dx² on ℝ³ has ∂₃ in the kernel
        let degenerate = PolyForm::term(3, vec![0, 1], Poly::one(3));
        assert!(matches!(
            make_plectic(degenerate),
            Err(PlecticError::Degenerate { .. })
        ));
        // non-closed
        let not_closed = PolyForm::term(3, vec![0, 1], x(2));
        assert!(matches!(make_plectic(not_closed), Err(PlecticError::NotClosed)));
    }

    #[test]
    fn hamiltonian_examples() {
        let p = p_r3();
        // α = x³dx¹ → X = −∂₂
        let alpha = PolyForm::term(3, vec![0], x(2));
        let xa = p.hamiltonian_vf(&alpha).unwrap();
        assert_eq!(xa, -&VectorField::coordinate(3, 1));
        // α = x¹dx² → X = −∂₃
        let beta = PolyForm::term(3, vec![1], x(0));
        assert_eq!(p.hamiltonian_vf(&beta).unwrap(), -&VectorField::coordinate(3, 2));
        // exact α = df → X = 0
        let df = PolyForm::from_poly(&(&x(0) * &x(1)) * &x(2)).d();
        assert!(p.hamiltonian_vf(&df).unwrap().is_zero());
        // oracle agreement
        assert_eq!(xa, hamiltonian_vf_eps_r3(&alpha));
    }

    #[test]
    fn bracket_examples() {
        let p = p_r3();
        let alpha = PolyForm::term(3, vec![0], x(2));
        let beta = PolyForm::term(3, vec![1], x(0));
        // [x³dx¹, x¹dx²] = dx¹
        let br = p.bracket_forms(&alpha, &beta).unwrap();
        assert_eq!(br, PolyForm::dx(3, 0));
        assert_eq!(br, bracket_eps_r3(&alpha, &beta));
        // antisymmetry
        assert!((&p.bracket_forms(&alpha, &alpha).unwrap()).is_zero());
        // f-component always 0
        let o = p
            .bracket(&Observable::from_form(alpha.clone()), &Observable::from_form(beta))
            .unwrap();
        assert!(o.f.is_zero());
        // X_{[α,β]} = [X_α, X_β]
        let beta2 = PolyForm::term(3, vec![1], &x(0) * &x(2));
        let br2 = p.bracket_forms(&alpha, &beta2).unwrap();
        let lhs = p.hamiltonian_vf(&br2).unwrap();
        let rhs = p
            .hamiltonian_vf(&alpha)
            .unwrap()
            .bracket(&p.hamiltonian_vf(&beta2).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobiator_instance() {
        let p = p_r3();
        let alpha = PolyForm::term(3, vec![0], x(2));
        let beta = PolyForm::term(3, vec![1], x(0));
        let gamma = PolyForm::term(3, vec![2], x(1));
        let j = p.jacobiator(&alpha, &beta, &gamma).unwrap();
        assert_eq!(j.f, Poly::one(3));
        // one exact member kills the f-part
        let exact = PolyForm::from_poly(&x(0) * &x(1)).d();
        let j2 = p.jacobiator(&exact, &beta, &gamma).unwrap();
        assert!(j2.f.is_zero());
    }

    #[test]
    fn homotopy_identity_cubic_instance() {
        let p = p_r3();
        let alpha = PolyForm::term(3, vec![0], &x(1) * &x(2));
        let beta = &PolyForm::term(3, vec![1], &x(0) * &x(0)) + &PolyForm::term(3, vec![2], x(1));
        let gamma = PolyForm::term(3, vec![2], &x(0) * &x(1));
        let res = p.homotopy_residual(&alpha, &beta, &gamma).unwrap();
        assert!(res.is_zero(), "residual: {res:?}");
    }

    #[test]
    fn prequantum_examples() {
        let p = p_r3();
        let gerbe = TrivialGerbe::new(prequantum_rho()).unwrap().as_gerbe();
        assert!(p.prequantum_check(&gerbe).is_ok());
        let doubled = make_plectic(vol3().scale(&Scalar::from_int(2))).unwrap();
        assert!(matches!(
            doubled.prequantum_check(&gerbe),
            Err(PlecticError::Mismatch { .. })
        ));
        let flat = TrivialGerbe::new(PolyForm::zero(3, 2)).unwrap().as_gerbe();
        // ω = 0 is not multisymplectic, so check the mismatch directly
        assert!(flat.curvature_3form().is_zero());
    }

    #[test]
    fn reduction() {
        let p = p_r3();
        let red = p.reduce_dimension(2).unwrap();
        assert_eq!(*red.omega(), PolyForm::term(2, vec![0, 1], Poly::one(2)));
        // re-reduction fails: the contraction of a symplectic surface form is
        // a 1-form, which is not a multisymplectic structure
        assert!(matches!(
            red.reduce_dimension(1),
            Err(PlecticError::Degenerate { .. })
        ));
        // non-invariant direction
        let omega = PolyForm::term(3, vec![0, 1, 2], Poly::one(3));
        let p2 = make_plectic(omega).unwrap();
        let twisted = make_plectic(
            &vol3() + &PolyForm::term(3, vec![0, 1, 2], Poly::zero(3)),
        )
        .unwrap();
        let _ = (p2, twisted);
        let dep = make_plectic(vol3().scale_poly(&(&Poly::one(3) + &(&x(2) * &x(2)))));
        let dep = dep.unwrap();
        assert!(matches!(
            dep.reduce_dimension(2),
            Err(PlecticError::NotInvariant { .. })
        ));
    }

    #[test]
    fn bracket_commutes_with_reduction() {
        let p = p_r3();
        let red = p.reduce_dimension(2).unwrap();
        // x³-independent observables
        let alpha = &PolyForm::term(3, vec![2], &x(0) * &x(1))
            + &PolyForm::term(3, vec![0], x(1));
        let beta = &PolyForm::term(3, vec![2], &x(1) * &x(1)) + &PolyForm::term(3, vec![1], x(0));
        let bracket_then_reduce = p
            .reduce_observable(
                &Observable::from_form(p.bracket_forms(&alpha, &beta).unwrap()),
                2,
            )
            .unwrap();
        let fa = p.reduce_observable(&Observable::from_form(alpha), 2).unwrap();
        let fb = p.reduce_observable(&Observable::from_form(beta), 2).unwrap();
        let reduce_then_bracket = red.bracket_forms(&fa, &fb).unwrap();
        assert_eq!(bracket_then_reduce, reduce_then_bracket);
    }
}
