//! The trivial-gerbe 2-Hilbert space model on ℝ³: sections are u(n)-valued
//! 1-forms, homs are polynomial matrix solutions of f·ω = η·f + df, and the
//! inner product is the (point-independent) trace pairing.

use super::matform::{MatForm, MatPoly};
use super::TwovectError;
use crate::exterior::fraction::{FracMatrix, ScalarFrac};
use crate::exterior::{Poly, PolyForm, Scalar};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A section of the trivial gerbe: an anti-hermitian matrix-valued global
/// 1-form.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ModelSection {
    n: usize,
    omega: MatForm,
}

impl ModelSection {
    pub fn new(omega: MatForm) -> Result<Self, TwovectError> {
        if omega.rows() != omega.cols() || omega.degree() != 1 {
            return Err(TwovectError::InvalidData {
                detail: "a section is a square matrix of 1-forms".into(),
            });
        }
        if !omega.is_anti_hermitian() {
            return Err(TwovectError::InvalidData {
                detail: "section coefficients must be anti-hermitian".into(),
            });
        }
        Ok(ModelSection {
            n: omega.rows(),
            omega,
        })
    }

    /// The rank-1 section carried by a scalar anti-hermitian 1-form.
    pub fn scalar(form: &PolyForm) -> Result<Self, TwovectError> {
        ModelSection::new(MatForm::scalar(1, form))
    }

    pub fn zero(n: usize, dim: usize) -> Self {
        ModelSection {
            n,
            omega: MatForm::zero(n, n, dim, 1),
        }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> &MatForm {
        &self.omega
    }
}

/// A morphism of sections: a polynomial matrix f with f·ω = η·f + df.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ModelHom {
    pub f: MatPoly,
}

/// The defining residual f·ω − η·f − df, exactly.
pub fn hom_residual(f: &MatPoly, omega: &ModelSection, eta: &ModelSection) -> MatForm {
    omega
        .omega
        .left_mul(f)
        .sub(&eta.omega.right_mul(f))
        .sub(&f.d())
}

/// All monomial exponent tuples in `dim` variables of total degree ≤ bound.
fn monomials_up_to(dim: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
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

/// Exact basis of the polynomial hom space { f degree ≤ D : f·ω = η·f + df },
/// by linear solve over the coefficient field; every returned hom is
/// re-verified symbolically.
pub fn hom_space(omega: &ModelSection, eta: &ModelSection, max_degree: u32) -> Vec<ModelHom> {
    let dim = omega.omega.dim();
    let (n, np) = (omega.n, eta.n);
    let monos = monomials_up_to(dim, max_degree);
    // one unknown per (row, col, monomial)
    let unknowns: Vec<(usize, usize, Vec<u32>)> = (0..np)
        .flat_map(|r| {
            let monos = monos.clone();
            (0..n).flat_map(move |c| monos.clone().into_iter().map(move |m| (r, c, m)))
        })
        .collect();
    // residual column per unknown basis matrix
    let mut rows: BTreeMap<(usize, usize, Vec<u8>, Vec<u32>), usize> = BTreeMap::new();
    let mut columns: Vec<BTreeMap<usize, Scalar>> = Vec::with_capacity(unknowns.len());
    for (r, c, m) in &unknowns {
        let mut f = MatPoly::zero(np, n, dim);
        *f.at_mut(*r, *c) = Poly::monomial(dim, m.clone(), Scalar::one());
        let res = hom_residual(&f, omega, eta);
        let mut col = BTreeMap::new();
        for er in 0..np {
            for ec in 0..n {
                for (idx, p) in res.at(er, ec).terms() {
                    for (e, s) in p.terms() {
                        let key = (er, ec, idx.clone(), e.clone());
                        let next = rows.len();
                        let row = *rows.entry(key).or_insert(next);
                        col.insert(row, s.clone());
                    }
                }
            }
        }
        columns.push(col);
    }
    let mut mat = FracMatrix::zero(rows.len(), unknowns.len());
    for (j, col) in columns.iter().enumerate() {
        for (&i, s) in col {
            mat.set(i, j, ScalarFrac::from_scalar(s.clone()));
        }
    }
    let basis = mat.nullspace();
    let mut out = Vec::new();
    for vec in basis {
        // clear denominators so the hom has polynomial (in π) coefficients
        let mut cleared: Vec<ScalarFrac> = vec;
        let denominators: Vec<Scalar> = cleared
            .iter()
            .filter_map(|v| {
                if v.den == Scalar::one() {
                    None
                } else {
                    Some(v.den.clone())
                }
            })
            .collect();
        for d in denominators {
            let factor = ScalarFrac::from_scalar(d);
            cleared = cleared.iter().map(|v| v.mul(&factor)).collect();
        }
        let mut f = MatPoly::zero(np, n, dim);
        for ((r, c, m), v) in unknowns.iter().zip(&cleared) {
            if let Some(s) = v.as_polynomial() {
                if !s.is_zero() {
                    let mut p = f.at(*r, *c).clone();
                    p.add_term(m.clone(), s);
                    *f.at_mut(*r, *c) = p;
                }
            }
        }
        debug_assert!(hom_residual(&f, omega, eta).is_zero());
        out.push(ModelHom { f });
    }
    out
}

/// The 2-Hilbert inner product ≺f,g≻ = tr(f*(x)·g(x)) at x = 0, audited for
/// x-independence at 5 seeded rational points (exact equality).
pub fn inner_product_hilbert(f: &ModelHom, g: &ModelHom) -> Result<Complex64, TwovectError> {
    let h = f.f.adjoint().mul(&g.f);
    let dim = h.dim();
    let mut trace = Poly::zero(dim);
    for i in 0..h.rows().min(h.cols()) {
        trace = &trace + h.at(i, i);
    }
    let at_zero = trace.eval_rational(&vec![num_traits::Zero::zero(); dim]);
    let mut rng = crate::rng::seeded_rng(0x1BBE);
    for _ in 0..5 {
        let x: Vec<_> = (0..dim).map(|_| crate::rng::small_rational(&mut rng)).collect();
        if trace.eval_rational(&x) != at_zero {
            return Err(TwovectError::XDependence {
                detail: "trace pairing varies over the base".into(),
            });
        }
    }
    Ok(at_zero.eval())
}

/// The line bundle gerbe metric on sections: 𝔥(ω,η) = −ωᵗ⊗𝟙 + 𝟙⊗η.
pub fn gerbe_metric(omega: &ModelSection, eta: &ModelSection) -> ModelSection {
    let m = omega.omega.transpose().neg().kron_sum(&eta.omega);
    ModelSection {
        n: omega.n * eta.n,
        omega: m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn section_2pi_dx1() -> ModelSection {
        ModelSection::scalar(&PolyForm::dx(3, 0).scale(&Scalar::two_pi_i())).unwrap()
    }

    #[test]
    fn constants_solve_the_trivial_equation() {
        // ω = η = 0 in rank 1: solutions are the constants, dimension 1
        let zero = ModelSection::zero(1, 3);
        for degree in [0, 1, 3] {
            let basis = hom_space(&zero, &zero, degree);
            assert_eq!(basis.len(), 1);
            assert!(basis[0].f.at(0, 0).is_constant());
        }
    }

    #[test]
    fn exponential_sector_is_empty() {
        // the true parallel hom for ω = 2πi dx¹, η = 0 is exp(2πi x¹): no
        // polynomial solves df = f·2πi dx¹
        let omega = section_2pi_dx1();
        let eta = ModelSection::zero(1, 3);
        for degree in [0, 2, 4] {
            assert!(hom_space(&omega, &eta, degree).is_empty());
        }
    }

    #[test]
    fn constant_sections_give_the_commutant() {
        // ω = η = i·diag(1, 2)·dx¹: solutions are the constant matrices
        // commuting with diag(1, 2), i.e. the diagonal ones
        let mut m = MatForm::zero(2, 2, 3, 1);
        *m.at_mut(0, 0) = PolyForm::dx(3, 0).scale(&Scalar::i());
        *m.at_mut(1, 1) = PolyForm::dx(3, 0).scale(&Scalar::i()).scale(&Scalar::from_int(2));
        let omega = ModelSection::new(m).unwrap();
        let basis = hom_space(&omega, &omega, 1);
        assert_eq!(basis.len(), 2);
        for hom in &basis {
            assert!(hom.f.at(0, 1).is_zero());
            assert!(hom.f.at(1, 0).is_zero());
            assert!(hom.f.at(0, 0).is_constant() && hom.f.at(1, 1).is_constant());
        }
        // independent oracle: the Sylvester system Xω₁ − ω₁X = 0 on constant
        // 2×2 matrices with ω₁ = diag(i, 2i) has a 2-dimensional kernel
        let w = super::super::CMat::diagonal(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0)]);
        let mut sylvester = super::super::CMat::zero(4, 4);
        for r in 0..2 {
            for c in 0..2 {
                for rr in 0..2 {
                    for cc in 0..2 {
                        // entry of X·w − w·X at (r, c) as a function of X_{rr,cc}
                        let mut v = Complex64::new(0.0, 0.0);
                        if r == rr {
                            v += w.get(cc, c);
                        }
                        if c == cc {
                            v -= w.get(r, rr);
                        }
                        sylvester.set(r * 2 + c, rr * 2 + cc, v);
                    }
                }
            }
        }
        assert_eq!(sylvester.kernel_basis(1e-10).len(), 2);
    }

    #[test]
    fn every_hom_satisfies_the_equation_exactly() {
        let zero1 = ModelSection::zero(2, 3);
        let mut m = MatForm::zero(2, 2, 3, 1);
        *m.at_mut(0, 1) = PolyForm::dx(3, 1);
        *m.at_mut(1, 0) = -&PolyForm::dx(3, 1);
        let eta = ModelSection::new(m).unwrap();
        for hom in hom_space(&zero1, &eta, 2) {
            assert!(hom_residual(&hom.f, &zero1, &eta).is_zero());
        }
    }

    #[test]
    fn inner_product_examples() {
        let id2 = ModelHom {
            f: MatPoly::identity(2, 3),
        };
        let v = inner_product_hilbert(&id2, &id2).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        // orthogonal constant matrices pair to zero
        let mut e01 = MatPoly::zero(2, 2, 3);
        *e01.at_mut(0, 1) = Poly::one(3);
        let mut e10 = MatPoly::zero(2, 2, 3);
        *e10.at_mut(1, 0) = Poly::one(3);
        let a = ModelHom { f: e01 };
        let b = ModelHom { f: e10 };
        assert!(inner_product_hilbert(&a, &b).unwrap().norm() < 1e-14);
        // positive definiteness on a nonzero hom
        let p = inner_product_hilbert(&a, &a).unwrap();
        assert!(p.re > 0.0 && p.im.abs() < 1e-14);
        // an x-dependent pairing is flagged
        let mut xf = MatPoly::zero(1, 1, 3);
        *xf.at_mut(0, 0) = Poly::var(3, 0);
        let bad = ModelHom { f: xf };
        assert!(matches!(
            inner_product_hilbert(&bad, &bad),
            Err(TwovectError::XDependence { .. })
        ));
    }

    #[test]
    fn gerbe_metric_formula_and_naturality() {
        let zero = ModelSection::zero(1, 3);
        assert!(gerbe_metric(&zero, &zero).omega().is_zero());
        // naturality: hom(ω,η) ≅ hom(0, 𝔥(ω,η)) dimension-wise
        let omega = section_2pi_dx1();
        let eta = ModelSection::scalar(&PolyForm::dx(3, 1).scale(&Scalar::two_pi_i())).unwrap();
        for (w, e) in [(&zero, &zero), (&omega, &omega), (&omega, &eta)] {
            let h = gerbe_metric(w, e);
            let d1 = hom_space(w, e, 2).len();
            let d2 = hom_space(&ModelSection::zero(1, 3), &h, 2).len();
            assert_eq!(d1, d2);
        }
        // additivity in the second slot: 𝔥(ω, η⊕η′) splits
        let sum = ModelSection::new(eta.omega().block_diag(eta.omega())).unwrap();
        let h_sum = gerbe_metric(&omega, &sum);
        let d_sum = hom_space(&ModelSection::zero(1, 3), &h_sum, 2).len();
        let d_each = hom_space(&ModelSection::zero(1, 3), &gerbe_metric(&omega, &eta), 2).len();
        assert_eq!(d_sum, 2 * d_each);
    }
}
