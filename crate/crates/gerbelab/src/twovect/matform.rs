//! Matrices with exact polynomial and differential-form entries: connection
//! data and the global sections/homs of the trivial-gerbe model.

use crate::exterior::{Poly, PolyForm, Scalar};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A matrix of exact polynomials (row-major).
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MatPoly {
    rows: usize,
    cols: usize,
    dim: usize,
    entries: Vec<Poly>,
}

impl MatPoly {
    pub fn zero(rows: usize, cols: usize, dim: usize) -> Self {
        MatPoly {
            rows,
            cols,
            dim,
            entries: vec![Poly::zero(dim); rows * cols],
        }
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        let mut m = MatPoly::zero(n, n, dim);
        for i in 0..n {
            *m.at_mut(i, i) = Poly::one(dim);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let dim = entries[0].dim();
        assert!(entries.iter().all(|p| p.dim() == dim));
        MatPoly {
            rows,
            cols,
            dim,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Poly {
        &mut self.entries[r * self.cols + c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn add(&self, rhs: &MatPoly) -> MatPoly {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        MatPoly::from_entries(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &MatPoly) -> MatPoly {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        MatPoly::from_entries(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, s: &Scalar) -> MatPoly {
        MatPoly::from_entries(
            self.rows,
            self.cols,
            self.entries.iter().map(|p| p.scale(s)).collect(),
        )
    }

    pub fn mul(&self, rhs: &MatPoly) -> MatPoly {
        assert_eq!(self.cols, rhs.rows);
        let mut m = MatPoly::zero(self.rows, rhs.cols, self.dim);
        for r in 0..self.rows {
            for k in 0..self.cols {
                for c in 0..rhs.cols {
                    let prod = self.at(r, k) * rhs.at(k, c);
                    *m.at_mut(r, c) = &*m.at(r, c) + &prod;
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> MatPoly {
        let mut m = MatPoly::zero(self.cols, self.rows, self.dim);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *m.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        m
    }

    /// Entrywise complex conjugation of the coefficients.
    pub fn conj(&self) -> MatPoly {
        MatPoly::from_entries(
            self.rows,
            self.cols,
            self.entries.iter().map(Poly::conj).collect(),
        )
    }

    pub fn adjoint(&self) -> MatPoly {
        self.conj().transpose()
    }

    /// Entrywise exterior derivative.
    pub fn d(&self) -> MatForm {
        MatForm::from_entries(
            self.rows,
            self.cols,
            self.dim,
            1,
            self.entries
                .iter()
                .map(|p| PolyForm::from_poly(p.clone()).d())
                .collect(),
        )
    }

    /// Exact evaluation at a rational point, entrywise.
    pub fn eval_rational(&self, x: &[crate::exterior::Rat]) -> Vec<Scalar> {
        self.entries.iter().map(|p| p.eval_rational(x)).collect()
    }

    /// Numeric evaluation at a point, as a complex matrix.
    pub fn eval_f64(&self, x: &[f64]) -> super::CMat {
        super::CMat::from_fn(self.rows, self.cols, |r, c| self.at(r, c).eval_f64(x))
    }
}

/// A matrix of exact differential forms of a common degree (row-major).
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MatForm {
    rows: usize,
    cols: usize,
    dim: usize,
    degree: usize,
    entries: Vec<PolyForm>,
}

impl MatForm {
    pub fn zero(rows: usize, cols: usize, dim: usize, degree: usize) -> Self {
        MatForm {
            rows,
            cols,
            dim,
            degree,
            entries: vec![PolyForm::zero(dim, degree); rows * cols],
        }
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        dim: usize,
        degree: usize,
        entries: Vec<PolyForm>,
    ) -> Self {
        assert_eq!(entries.len(), rows * cols);
        assert!(entries
            .iter()
            .all(|f| f.dim() == dim && f.degree() == degree));
        MatForm {
            rows,
            cols,
            dim,
            degree,
            entries,
        }
    }

    /// A scalar form times the identity matrix.
    pub fn scalar(n: usize, form: &PolyForm) -> Self {
        let mut m = MatForm::zero(n, n, form.dim(), form.degree());
        for i in 0..n {
            *m.at_mut(i, i) = form.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn at(&self, r: usize, c: usize) -> &PolyForm {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut PolyForm {
        &mut self.entries[r * self.cols + c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(PolyForm::is_zero)
    }

    pub fn add(&self, rhs: &MatForm) -> MatForm {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        MatForm::from_entries(
            self.rows,
            self.cols,
            self.dim,
            self.degree,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &MatForm) -> MatForm {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> MatForm {
        MatForm::from_entries(
            self.rows,
            self.cols,
            self.dim,
            self.degree,
            self.entries.iter().map(|f| -f).collect(),
        )
    }

    pub fn transpose(&self) -> MatForm {
        let mut m = MatForm::zero(self.cols, self.rows, self.dim, self.degree);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *m.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        m
    }

    pub fn conj(&self) -> MatForm {
        MatForm::from_entries(
            self.rows,
            self.cols,
            self.dim,
            self.degree,
            self.entries.iter().map(PolyForm::conj).collect(),
        )
    }

    pub fn adjoint(&self) -> MatForm {
        self.conj().transpose()
    }

    /// True iff every coefficient matrix is anti-hermitian (ω* = −ω), exactly.
    pub fn is_anti_hermitian(&self) -> bool {
        self.rows == self.cols && self.adjoint().add(self).is_zero()
    }

    /// Multiply a polynomial matrix from the left: (f·ω)_rc = Σ_k f_rk ω_kc.
    pub fn left_mul(&self, f: &MatPoly) -> MatForm {
        assert_eq!(f.cols(), self.rows);
        let mut m = MatForm::zero(f.rows(), self.cols, self.dim, self.degree);
        for r in 0..f.rows() {
            for k in 0..self.rows {
                for c in 0..self.cols {
                    let prod = self.at(k, c).scale_poly(f.at(r, k));
                    *m.at_mut(r, c) = &*m.at(r, c) + &prod;
                }
            }
        }
        m
    }

    /// Multiply a polynomial matrix from the right: (ω·f)_rc = Σ_k ω_rk f_kc.
    pub fn right_mul(&self, f: &MatPoly) -> MatForm {
        assert_eq!(self.cols, f.rows());
        let mut m = MatForm::zero(self.rows, f.cols(), self.dim, self.degree);
        for r in 0..self.rows {
            for k in 0..self.cols {
                for c in 0..f.cols() {
                    let prod = self.at(r, k).scale_poly(f.at(k, c));
                    *m.at_mut(r, c) = &*m.at(r, c) + &prod;
                }
            }
        }
        m
    }

    /// Kronecker-sum block structure for tensor connections:
    /// self ⊗ 𝟙_m + 𝟙_n ⊗ rhs.
    pub fn kron_sum(&self, rhs: &MatForm) -> MatForm {
        assert_eq!(self.rows, self.cols);
        assert_eq!(rhs.rows, rhs.cols);
        let (n, m) = (self.rows, rhs.rows);
        let mut out = MatForm::zero(n * m, n * m, self.dim, self.degree);
        for r in 0..n * m {
            for c in 0..n * m {
                let (ri, rj) = (r / m, r % m);
                let (ci, cj) = (c / m, c % m);
                let mut acc = PolyForm::zero(self.dim, self.degree);
                if rj == cj {
                    acc = &acc + self.at(ri, ci);
                }
                if ri == ci {
                    acc = &acc + rhs.at(rj, cj);
                }
                *out.at_mut(r, c) = acc;
            }
        }
        out
    }

    /// Kronecker product against the identity pattern is a special case; the
    /// general form multiplies a constant matrix into every entry slot:
    /// (κ ⊗ ω)[(r·p+i),(c·q+j)] = κ[r,c]·ω[i,j] with κ exact-scalar entries.
    pub fn kron_scalar_left(&self, kappa: &MatPoly) -> MatForm {
        let (p, q) = (self.rows, self.cols);
        let mut out = MatForm::zero(kappa.rows() * p, kappa.cols() * q, self.dim, self.degree);
        for r in 0..kappa.rows() * p {
            for c in 0..kappa.cols() * q {
                *out.at_mut(r, c) = self.at(r % p, c % q).scale_poly(kappa.at(r / p, c / q));
            }
        }
        out
    }

    pub fn block_diag(&self, rhs: &MatForm) -> MatForm {
        assert_eq!(self.dim, rhs.dim);
        assert_eq!(self.degree, rhs.degree);
        let mut out = MatForm::zero(
            self.rows + rhs.rows,
            self.cols + rhs.cols,
            self.dim,
            self.degree,
        );
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.at_mut(r, c) = self.at(r, c).clone();
            }
        }
        for r in 0..rhs.rows {
            for c in 0..rhs.cols {
                *out.at_mut(self.rows + r, self.cols + c) = rhs.at(r, c).clone();
            }
        }
        out
    }

    pub fn trace(&self) -> PolyForm {
        let mut acc = PolyForm::zero(self.dim, self.degree);
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + self.at(i, i);
        }
        acc
    }

    /// The coefficient matrix of a given (index tuple, monomial) pair,
    /// evaluated numerically.
    pub fn coefficient_matrix(&self, idx: &[u8], exps: &[u32]) -> super::CMat {
        super::CMat::from_fn(self.rows, self.cols, |r, c| {
            self.at(r, c)
                .coefficient(idx)
                .terms()
                .find(|(e, _)| e.as_slice() == exps)
                .map(|(_, s)| s.eval())
                .unwrap_or(Complex64::new(0.0, 0.0))
        })
    }

    /// All (index tuple, monomial) pairs occurring in any entry.
    pub fn support(&self) -> std::collections::BTreeSet<(Vec<u8>, Vec<u32>)> {
        let mut out = std::collections::BTreeSet::new();
        for f in &self.entries {
            for (idx, p) in f.terms() {
                for (e, _) in p.terms() {
                    out.insert((idx.clone(), e.clone()));
                }
            }
        }
        out
    }

    pub fn entries(&self) -> &[PolyForm] {
        &self.entries
    }
}
