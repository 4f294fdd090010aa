//! Multivariate polynomials over ℚ(i)[π] and polynomial maps ℝᵐ → ℝⁿ.

use super::scalar::{GaussRat, Rat, Scalar};
use super::ExteriorError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial in `dim` variables; keys are exponent multi-indices of length
/// `dim`, values are nonzero Scalars.  The BTreeMap keeps terms in lexicographic
/// order so serialization is bit-stable.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

#[derive(Serialize, Deserialize, Clone)]
struct PolyTermRepr {
    exps: Vec<u32>,
    scalar: Scalar,
}

#[derive(Serialize, Deserialize, Clone)]
struct PolyRepr {
    dim: usize,
    terms: Vec<PolyTermRepr>,
}

impl From<Poly> for PolyRepr {
    fn from(p: Poly) -> Self {
        PolyRepr {
            dim: p.dim,
            terms: p
                .terms
                .into_iter()
                .map(|(exps, scalar)| PolyTermRepr { exps, scalar })
                .collect(),
        }
    }
}

impl TryFrom<PolyRepr> for Poly {
    type Error = String;
    fn try_from(r: PolyRepr) -> Result<Self, String> {
        let mut p = Poly::zero(r.dim);
        for t in r.terms {
            if t.exps.len() != r.dim {
                return Err(format!(
                    "exponent tuple {:?} does not match dimension {}",
                    t.exps, r.dim
                ));
            }
            p.add_term(t.exps, t.scalar);
        }
        Ok(p)
    }
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, s: Scalar) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(vec![0; dim], s);
        p
    }

    pub fn one(dim: usize) -> Self {
        Poly::constant(dim, Scalar::one())
    }

    /// The coordinate function x^{i+1} (zero-based index `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index out of range");
        let mut exps = vec![0; dim];
        exps[i] = 1;
        let mut p = Poly::zero(dim);
        p.add_term(exps, Scalar::one());
        p
    }

    /// A monomial c·x^e.
    pub fn monomial(dim: usize, exps: Vec<u32>, c: Scalar) -> Self {
        assert_eq!(exps.len(), dim);
        let mut p = Poly::zero(dim);
        p.add_term(exps, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, s: Scalar) {
        debug_assert_eq!(exps.len(), self.dim);
        if s.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(s);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &s;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// True iff the polynomial does not involve variable `i`.
    pub fn independent_of(&self, i: usize) -> bool {
        self.terms.keys().all(|e| e[i] == 0)
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&vec![0; self.dim])
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.conj());
        }
        out
    }

    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.dim);
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.scale(&GaussRat::from_int(e[i] as i64)));
        }
        out
    }

    /// Numeric evaluation at a real point (coefficients may be complex).
    pub fn eval_f64(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = 1.0;
            for (xi, &ei) in x.iter().zip(e.iter()) {
                m *= xi.powi(ei as i32);
            }
            acc += c.eval() * m;
        }
        acc
    }

    /// Exact evaluation at a rational point; π stays formal.
    pub fn eval_rational(&self, x: &[Rat]) -> Scalar {
        assert_eq!(x.len(), self.dim);
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut m = GaussRat::one();
            for (xi, &ei) in x.iter().zip(e.iter()) {
                for _ in 0..ei {
                    m = GaussRat::new(&m.re * xi, &m.im * xi);
                }
            }
            acc = &acc + &c.scale(&m);
        }
        acc
    }

    /// Substitute `args[i]` for variable i; all `args` share some dimension m.
    pub fn substitute(&self, args: &[Poly]) -> Poly {
        assert_eq!(args.len(), self.dim);
        let m = args.first().map_or(0, Poly::dim);
        let mut acc = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(m, c.clone());
            for (arg, &ei) in args.iter().zip(e.iter()) {
                for _ in 0..ei {
                    term = &term * arg;
                }
            }
            acc = &acc + &term;
        }
        acc
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dim, rhs.dim, "Poly dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dim, rhs.dim, "Poly dimension mismatch");
        let mut out = Poly::zero(self.dim);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            for (i, &ei) in e.iter().enumerate() {
                match ei {
                    0 => {}
                    1 => write!(f, "·x{}", i + 1)?,
                    _ => write!(f, "·x{}^{}", i + 1, ei)?,
                }
            }
        }
        Ok(())
    }
}

/// A polynomial map ℝᵐ → ℝⁿ given by n component polynomials in m variables.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct PolyMap {
    pub src_dim: usize,
    pub components: Vec<Poly>,
}

impl PolyMap {
    pub fn new(src_dim: usize, components: Vec<Poly>) -> Result<Self, ExteriorError> {
        if components.iter().any(|p| p.dim() != src_dim) {
            return Err(ExteriorError::DimensionMismatch {
                context: "PolyMap components must live in the source dimension".into(),
            });
        }
        Ok(PolyMap {
            src_dim,
            components,
        })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            src_dim: n,
            components: (0..n).map(|i| Poly::var(n, i)).collect(),
        }
    }

    pub fn tgt_dim(&self) -> usize {
        self.components.len()
    }

    /// self ∘ rhs (apply rhs first).
    pub fn compose(&self, rhs: &PolyMap) -> Result<PolyMap, ExteriorError> {
        if rhs.tgt_dim() != self.src_dim {
            return Err(ExteriorError::DimensionMismatch {
                context: "PolyMap composition dimension mismatch".into(),
            });
        }
        Ok(PolyMap {
            src_dim: rhs.src_dim,
            components: self
                .components
                .iter()
                .map(|p| p.substitute(&rhs.components))
                .collect(),
        })
    }
}
