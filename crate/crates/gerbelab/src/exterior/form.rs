//! Polynomial-coefficient differential forms and vector fields on ℝⁿ.

use super::poly::{Poly, PolyMap};
use super::scalar::Scalar;
use super::ExteriorError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Sort an index tuple in place, returning the permutation sign, or None if an
/// index repeats (in which case the associated wedge term vanishes).
fn sort_indices(idx: &mut [u8]) -> Option<i32> {
    let mut sign = 1;
    // insertion sort, counting transpositions
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// A degree-p differential form with Poly coefficients.  Only strictly
/// increasing index tuples are stored, so antisymmetry is structural; keys are
/// ordered lexicographically for bit-stable serialization.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct PolyForm {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Vec<u8>, Poly>,
}

#[derive(Serialize, Deserialize, Clone)]
struct FormTermRepr {
    idx: Vec<u8>,
    poly: Poly,
}

#[derive(Serialize, Deserialize, Clone)]
struct FormRepr {
    dim: usize,
    deg: usize,
    terms: Vec<FormTermRepr>,
}

impl From<PolyForm> for FormRepr {
    fn from(a: PolyForm) -> Self {
        FormRepr {
            dim: a.dim,
            deg: a.degree,
            terms: a
                .terms
                .into_iter()
                .map(|(idx, poly)| FormTermRepr { idx, poly })
                .collect(),
        }
    }
}

impl TryFrom<FormRepr> for PolyForm {
    type Error = String;
    fn try_from(r: FormRepr) -> Result<Self, String> {
        let mut a = PolyForm::zero(r.dim, r.deg);
        for t in r.terms {
            if t.idx.len() != r.deg {
                return Err(format!("index tuple {:?} does not have degree {}", t.idx, r.deg));
            }
            if t.idx.iter().any(|&i| i as usize >= r.dim) {
                return Err(format!("index tuple {:?} out of dimension {}", t.idx, r.dim));
            }
            if t.poly.dim() != r.dim {
                return Err("coefficient dimension mismatch".into());
            }
            a.add_term(t.idx, t.poly);
        }
        Ok(a)
    }
}

impl PolyForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        PolyForm {
            dim,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Degree-0 form from a function.
    pub fn from_poly(p: Poly) -> Self {
        let dim = p.dim();
        let mut a = PolyForm::zero(dim, 0);
        a.add_term(Vec::new(), p);
        a
    }

    /// The coordinate 1-form dx^{i+1} (zero-based `i`).
    pub fn dx(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut a = PolyForm::zero(dim, 1);
        a.add_term(vec![i as u8], Poly::one(dim));
        a
    }

    /// p·dx^{i₁}∧…∧dx^{i_p} for an arbitrary (not necessarily sorted) tuple.
    pub fn term(dim: usize, idx: Vec<u8>, p: Poly) -> Self {
        let mut a = PolyForm::zero(dim, idx.len());
        a.add_term(idx, p);
        a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Poly)> {
        self.terms.iter()
    }

    /// Add p·dx^I, normalizing the index tuple to increasing order.
    pub fn add_term(&mut self, mut idx: Vec<u8>, p: Poly) {
        debug_assert_eq!(idx.len(), self.degree);
        debug_assert_eq!(p.dim(), self.dim);
        if p.is_zero() {
            return;
        }
        let Some(sign) = sort_indices(&mut idx) else {
            return;
        };
        let p = if sign < 0 { -&p } else { p };
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &p;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn coefficient(&self, idx: &[u8]) -> Poly {
        self.terms
            .get(idx)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.dim))
    }

    /// The single coefficient of a degree-0 form.
    pub fn as_poly(&self) -> Poly {
        assert_eq!(self.degree, 0);
        self.coefficient(&[])
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            out.add_term(idx.clone(), p.scale(s));
        }
        out
    }

    pub fn scale_poly(&self, q: &Poly) -> Self {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            out.add_term(idx.clone(), p * q);
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            out.add_term(idx.clone(), p.conj());
        }
        out
    }

    pub fn wedge(&self, rhs: &PolyForm) -> Result<PolyForm, ExteriorError> {
        if self.dim != rhs.dim {
            return Err(ExteriorError::DimensionMismatch {
                context: "wedge of forms on different spaces".into(),
            });
        }
        // Above top degree the result is structurally zero; returning the zero
        // form keeps generic cochain loops free of special cases.
        let degree = self.degree + rhs.degree;
        let mut out = PolyForm::zero(self.dim, degree);
        if degree > self.dim {
            return Ok(out);
        }
        for (i1, p1) in &self.terms {
            for (i2, p2) in &rhs.terms {
                let mut idx = i1.clone();
                idx.extend_from_slice(i2);
                out.add_term(idx, p1 * p2);
            }
        }
        Ok(out)
    }

    pub fn d(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree + 1);
        if self.degree >= self.dim {
            return out;
        }
        for (idx, p) in &self.terms {
            for i in 0..self.dim {
                let dp = p.partial(i);
                if dp.is_zero() {
                    continue;
                }
                let mut j = vec![i as u8];
                j.extend_from_slice(idx);
                out.add_term(j, dp);
            }
        }
        out
    }

    pub fn interior_product(&self, x: &VectorField) -> Result<PolyForm, ExteriorError> {
        if self.dim != x.dim {
            return Err(ExteriorError::DimensionMismatch {
                context: "interior product across dimensions".into(),
            });
        }
        if self.degree == 0 {
            return Err(ExteriorError::DegreeMismatch {
                context: "interior product of a degree-0 form".into(),
            });
        }
        let mut out = PolyForm::zero(self.dim, self.degree - 1);
        for (idx, p) in &self.terms {
            for (k, &ik) in idx.iter().enumerate() {
                let comp = &x.components[ik as usize];
                if comp.is_zero() {
                    continue;
                }
                let mut rest: Vec<u8> = idx.clone();
                rest.remove(k);
                let coeff = p * comp;
                let coeff = if k % 2 == 1 { -&coeff } else { coeff };
                out.add_term(rest, coeff);
            }
        }
        Ok(out)
    }

    pub fn lie_derivative(&self, x: &VectorField) -> Result<PolyForm, ExteriorError> {
        if self.degree == 0 {
            // Cartan reduces to ι_X d for functions.
            return self.d().interior_product(x);
        }
        let a = self.interior_product(x)?.d();
        let b = self.d().interior_product(x)?;
        Ok(&a + &b)
    }

    pub fn pullback(&self, f: &PolyMap) -> Result<PolyForm, ExteriorError> {
        if f.tgt_dim() != self.dim {
            return Err(ExteriorError::DimensionMismatch {
                context: "pullback target dimension mismatch".into(),
            });
        }
        let m = f.src_dim;
        // differentials of the map components, as 1-forms in the source space
        let df: Vec<PolyForm> = f
            .components
            .iter()
            .map(|p| {
                let mut a = PolyForm::zero(m, 1);
                for j in 0..m {
                    a.add_term(vec![j as u8], p.partial(j));
                }
                a
            })
            .collect();
        let mut out = PolyForm::zero(m, self.degree);
        if self.degree > m {
            return Ok(out);
        }
        for (idx, p) in &self.terms {
            let mut acc = PolyForm::from_poly(p.substitute(&f.components));
            for &i in idx {
                acc = acc.wedge(&df[i as usize])?;
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Numeric evaluation: multilinear alternating pairing with `xs.len() ==
    /// degree` tangent vectors at the point `x`.
    pub fn evaluate(&self, x: &[f64], xs: &[&[f64]]) -> Result<Complex64, ExteriorError> {
        if x.len() != self.dim || xs.iter().any(|v| v.len() != self.dim) {
            return Err(ExteriorError::DimensionMismatch {
                context: "evaluate point/tangent dimension mismatch".into(),
            });
        }
        if xs.len() != self.degree {
            return Err(ExteriorError::DegreeMismatch {
                context: format!(
                    "evaluate needs {} tangent vectors, got {}",
                    self.degree,
                    xs.len()
                ),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, p) in &self.terms {
            let k = idx.len();
            let mut m = vec![0.0; k * k];
            for (r, xv) in xs.iter().enumerate() {
                for (c, &i) in idx.iter().enumerate() {
                    m[r * k + c] = xv[i as usize];
                }
            }
            let det = det_f64(&mut m, k);
            if det != 0.0 {
                acc += p.eval_f64(x) * det;
            }
        }
        Ok(acc)
    }

    /// True iff no coefficient depends on variable `k` and no dx^k occurs.
    pub fn independent_of(&self, k: usize) -> bool {
        self.terms
            .iter()
            .all(|(idx, p)| !idx.contains(&(k as u8)) && p.independent_of(k))
    }

    /// Remove variable `k` from a form that is independent of it, producing a
    /// form on ℝ^{dim−1} with the remaining coordinates renumbered in order.
    pub fn drop_variable(&self, k: usize) -> Result<PolyForm, ExteriorError> {
        if !self.independent_of(k) {
            return Err(ExteriorError::DimensionMismatch {
                context: format!("form depends on variable {}", k + 1),
            });
        }
        let n = self.dim - 1;
        let mut out = PolyForm::zero(n, self.degree);
        for (idx, p) in &self.terms {
            let idx2: Vec<u8> = idx
                .iter()
                .map(|&i| if (i as usize) > k { i - 1 } else { i })
                .collect();
            let mut q = Poly::zero(n);
            for (e, c) in p.terms() {
                let mut e2 = e.clone();
                e2.remove(k);
                q.add_term(e2, c.clone());
            }
            out.add_term(idx2, q);
        }
        Ok(out)
    }
}

fn det_f64(m: &mut [f64], k: usize) -> f64 {
    // Gaussian elimination with partial pivoting; k is tiny (≤ 4) in practice.
    let mut det = 1.0;
    for col in 0..k {
        let mut piv = col;
        for r in col + 1..k {
            if m[r * k + col].abs() > m[piv * k + col].abs() {
                piv = r;
            }
        }
        if m[piv * k + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..k {
                m.swap(piv * k + c, col * k + c);
            }
            det = -det;
        }
        det *= m[col * k + col];
        for r in col + 1..k {
            let f = m[r * k + col] / m[col * k + col];
            for c in col..k {
                m[r * k + c] -= f * m[col * k + c];
            }
        }
    }
    det
}

impl Add for &PolyForm {
    type Output = PolyForm;
    fn add(self, rhs: &PolyForm) -> PolyForm {
        assert_eq!(self.dim, rhs.dim, "form dimension mismatch");
        assert_eq!(self.degree, rhs.degree, "form degree mismatch");
        let mut out = self.clone();
        for (idx, p) in &rhs.terms {
            out.add_term(idx.clone(), p.clone());
        }
        out
    }
}

impl Sub for &PolyForm {
    type Output = PolyForm;
    fn sub(self, rhs: &PolyForm) -> PolyForm {
        self + &(-rhs)
    }
}

impl Neg for &PolyForm {
    type Output = PolyForm;
    fn neg(self) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            out.add_term(idx.clone(), -p);
        }
        out
    }
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 (deg {})", self.degree);
        }
        let mut first = true;
        for (idx, p) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{p:?}]")?;
            for (pos, &i) in idx.iter().enumerate() {
                if pos == 0 {
                    write!(f, " dx{}", i + 1)?;
                } else {
                    write!(f, "∧dx{}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

/// A polynomial vector field X = Σ Xⁱ ∂ᵢ.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub dim: usize,
    pub components: Vec<Poly>,
}

impl VectorField {
    pub fn new(components: Vec<Poly>) -> Self {
        let dim = components.len();
        assert!(components.iter().all(|p| p.dim() == dim));
        VectorField { dim, components }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField {
            dim,
            components: vec![Poly::zero(dim); dim],
        }
    }

    /// The coordinate field ∂_{i+1}.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut v = VectorField::zero(dim);
        v.components[i] = Poly::one(dim);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// X acting on a function: Σ Xⁱ ∂ᵢp.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut acc = Poly::zero(self.dim);
        for (i, comp) in self.components.iter().enumerate() {
            acc = &acc + &(comp * &p.partial(i));
        }
        acc
    }

    /// Lie bracket [X, Y].
    pub fn bracket(&self, y: &VectorField) -> VectorField {
        assert_eq!(self.dim, y.dim);
        VectorField::new(
            (0..self.dim)
                .map(|i| &self.apply(&y.components[i]) - &y.apply(&self.components[i]))
                .collect(),
        )
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<Complex64> {
        self.components.iter().map(|p| p.eval_f64(x)).collect()
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        assert_eq!(self.dim, rhs.dim);
        VectorField::new(
            self.components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField::new(self.components.iter().map(|p| -p).collect())
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, p) in self.components.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{:?}]∂{}", p, i + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::scalar::Scalar;

    fn dx(i: usize) -> PolyForm {
        PolyForm::dx(3, i)
    }

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn wedge_basis_and_antisymmetry() {
        let a = dx(0).wedge(&dx(1)).unwrap();
        assert_eq!(a, PolyForm::term(3, vec![0, 1], Poly::one(3)));
        let b = dx(1).wedge(&dx(0)).unwrap();
        assert_eq!(b, -&a);
        assert!(dx(0).wedge(&dx(0)).unwrap().is_zero());
    }

    #[test]
    fn wedge_term_expansion() {
        // (x³ dx¹)∧(x¹ dx²) = x¹x³ dx¹∧dx²
        let a = PolyForm::term(3, vec![0], x(2));
        let b = PolyForm::term(3, vec![1], x(0));
        let w = a.wedge(&b).unwrap();
        assert_eq!(w, PolyForm::term(3, vec![0, 1], &x(0) * &x(2)));
    }

    #[test]
    fn graded_commutativity() {
        let a = PolyForm::term(3, vec![0], x(1)); // odd degree
        let vol = dx(0).wedge(&dx(1)).unwrap().wedge(&dx(2)).unwrap();
        let _ = vol;
        let b = PolyForm::term(3, vec![1, 2], x(0)); // even degree
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ab, ba); // (−1)^{1·2} = +1
    }

    #[test]
    fn d_term_by_term() {
        // d(x³ dx¹) = dx³∧dx¹ = −dx¹∧dx³
        let a = PolyForm::term(3, vec![0], x(2));
        let expect = -&PolyForm::term(3, vec![0, 2], Poly::one(3));
        assert_eq!(a.d(), expect);
    }

    #[test]
    fn d_squared_zero() {
        let p = &(&x(0) * &x(1)) + &(&x(2) * &x(2));
        let a = PolyForm::term(3, vec![1], p);
        assert!(a.d().d().is_zero());
        assert!(PolyForm::from_poly(&x(0) * &(&x(1) * &x(2))).d().d().is_zero());
    }

    #[test]
    fn interior_product_sign_bookkeeping() {
        let vol = dx(0).wedge(&dx(1)).unwrap().wedge(&dx(2)).unwrap();
        let e2 = VectorField::coordinate(3, 1);
        // ι_{∂₂}(dx¹∧dx²∧dx³) = −dx¹∧dx³
        let got = vol.interior_product(&e2).unwrap();
        assert_eq!(got, -&PolyForm::term(3, vec![0, 2], Poly::one(3)));
        // ι_{−∂₂} vol = dx¹∧dx³ = −d(x³dx¹)
        let got2 = vol.interior_product(&-&e2).unwrap();
        assert_eq!(got2, -&PolyForm::term(3, vec![0], x(2)).d());
        // ι_X∘ι_X = 0
        let xf = VectorField::new(vec![x(1), &x(0) * &x(2), Poly::one(3)]);
        assert!(vol
            .interior_product(&xf)
            .unwrap()
            .interior_product(&xf)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn cartan_formula() {
        // ℒ_{∂₁}(x¹dx²) = dx²
        let a = PolyForm::term(3, vec![1], x(0));
        let got = a.lie_derivative(&VectorField::coordinate(3, 0)).unwrap();
        assert_eq!(got, dx(1));
        // ℒ_X on degree 0 is X(p)
        let xf = VectorField::new(vec![x(1), x(2), x(0)]);
        let p = &x(0) * &x(1);
        assert_eq!(
            PolyForm::from_poly(p.clone()).lie_derivative(&xf).unwrap(),
            PolyForm::from_poly(xf.apply(&p))
        );
    }

    #[test]
    fn lie_derivative_commutes_with_d() {
        let xf = VectorField::new(vec![&x(1) * &x(1), x(2), &x(0) * &x(1)]);
        let a = PolyForm::term(3, vec![0, 2], &x(1) * &x(2));
        let lhs = a.d().lie_derivative(&xf).unwrap();
        let rhs = a.lie_derivative(&xf).unwrap().d();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pullback_chain_rule() {
        // f(τ) = (τ², 0, 0): f*(dx¹) = 2τ dτ
        let t = Poly::var(1, 0);
        let f = PolyMap::new(1, vec![&t * &t, Poly::zero(1), Poly::zero(1)]).unwrap();
        let got = dx(0).pullback(&f).unwrap();
        let expect = PolyForm::term(1, vec![0], Poly::monomial(1, vec![1], Scalar::from_int(2)));
        assert_eq!(got, expect);
        // pullback(id, a) = a
        let a = PolyForm::term(3, vec![0, 1], &x(2) * &x(2));
        assert_eq!(a.pullback(&PolyMap::identity(3)).unwrap(), a);
    }

    #[test]
    fn pullback_naturality() {
        let u = Poly::var(2, 0);
        let v = Poly::var(2, 1);
        let f = PolyMap::new(2, vec![&u * &v, &v * &v, u.clone()]).unwrap();
        let a = PolyForm::term(3, vec![1], &x(0) * &x(2));
        assert_eq!(
            a.d().pullback(&f).unwrap(),
            a.pullback(&f).unwrap().d()
        );
    }

    #[test]
    fn evaluate_permutation_sign() {
        let vol = dx(0).wedge(&dx(1)).unwrap().wedge(&dx(2)).unwrap();
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        let e3 = [0.0, 0.0, 1.0];
        let x0 = [0.3, -2.0, 7.5];
        // (e₃,e₁,e₂) is an even permutation
        let v = vol.evaluate(&x0, &[&e3, &e1, &e2]).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let w = vol.evaluate(&x0, &[&e1, &e3, &e2]).unwrap();
        assert!((w - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn vf_bracket_of_coordinates_vanishes() {
        let a = VectorField::coordinate(3, 0);
        let b = VectorField::coordinate(3, 2);
        assert!(a.bracket(&b).is_zero());
    }

    #[test]
    fn drop_variable_round_trip() {
        let a = PolyForm::term(3, vec![0, 1], &x(0) * &x(1));
        assert!(a.independent_of(2));
        let b = a.drop_variable(2).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(
            b,
            PolyForm::term(2, vec![0, 1], &Poly::var(2, 0) * &Poly::var(2, 1))
        );
        assert!(PolyForm::term(3, vec![2], Poly::one(3)).drop_variable(2).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let a = PolyForm::term(3, vec![2, 0], &x(1) * &x(1));
        let s = serde_json::to_string(&a).unwrap();
        let b: PolyForm = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
