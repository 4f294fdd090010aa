//! The fraction field ℚ(i)(π) and exact dense linear algebra over it.
//!
//! Several operations (Hamiltonian vector fields, parallel-hom enumeration,
//! trivialization search) reduce to linear systems whose entries live in
//! ℚ(i)[π].  Solving over the fraction field keeps everything exact.

use super::scalar::{GaussRat, Scalar};

fn leading(s: &Scalar) -> GaussRat {
    s.coeffs().last().cloned().unwrap_or_else(GaussRat::zero)
}

/// Make a univariate π-polynomial monic.
fn monic(s: &Scalar) -> Scalar {
    if s.is_zero() {
        return Scalar::zero();
    }
    s.scale(&leading(s).inv())
}

/// Polynomial division in ℚ(i)[π]: returns (quotient, remainder).
fn div_rem(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
    assert!(!b.is_zero(), "division by zero polynomial");
    let mut rem = a.clone();
    let mut quo = Scalar::zero();
    let db = b.pi_degree();
    let lb = leading(b).inv();
    while !rem.is_zero() && rem.pi_degree() >= db {
        let k = rem.pi_degree() - db;
        let c = &leading(&rem) * &lb;
        // term = c·π^k
        let mut coeffs = vec![GaussRat::zero(); k + 1];
        coeffs[k] = c;
        let term = Scalar::from_coeffs(coeffs);
        quo = &quo + &term;
        rem = &rem - &(&term * b);
    }
    (quo, rem)
}

fn gcd(a: &Scalar, b: &Scalar) -> Scalar {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

/// An element of the fraction field ℚ(i)(π), kept reduced with monic
/// denominator so equality is structural.
#[derive(Clone, PartialEq, Debug)]
pub struct ScalarFrac {
    pub num: Scalar,
    pub den: Scalar,
}

impl ScalarFrac {
    pub fn new(num: Scalar, den: Scalar) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut f = ScalarFrac { num, den };
        f.reduce();
        f
    }

    pub fn from_scalar(s: Scalar) -> Self {
        ScalarFrac {
            num: s,
            den: Scalar::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_scalar(Scalar::zero())
    }

    pub fn one() -> Self {
        Self::from_scalar(Scalar::one())
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Scalar::one();
            return;
        }
        let g = gcd(&self.num, &self.den);
        let (qn, rn) = div_rem(&self.num, &g);
        let (qd, rd) = div_rem(&self.den, &g);
        debug_assert!(rn.is_zero() && rd.is_zero());
        self.num = qn;
        self.den = qd;
        // normalize denominator to monic
        let l = leading(&self.den);
        if !(&l - &GaussRat::one()).is_zero() {
            let inv = l.inv();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, rhs: &ScalarFrac) -> ScalarFrac {
        ScalarFrac::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }

    pub fn sub(&self, rhs: &ScalarFrac) -> ScalarFrac {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> ScalarFrac {
        ScalarFrac {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &ScalarFrac) -> ScalarFrac {
        ScalarFrac::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }

    pub fn div(&self, rhs: &ScalarFrac) -> ScalarFrac {
        assert!(!rhs.is_zero(), "division by zero");
        ScalarFrac::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    /// The underlying polynomial if the denominator is trivial.
    pub fn as_polynomial(&self) -> Option<Scalar> {
        if self.den == Scalar::one() {
            Some(self.num.clone())
        } else {
            None
        }
    }
}

/// Dense matrix over ℚ(i)(π), row-major.
pub struct FracMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<ScalarFrac>,
}

impl FracMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        FracMatrix {
            rows,
            cols,
            data: vec![ScalarFrac::zero(); rows * cols],
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &ScalarFrac {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: ScalarFrac) {
        self.data[r * self.cols + c] = v;
    }

    /// Reduced row echelon form; returns the pivot column of each pivot row.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(p * self.cols + c, row * self.cols + c);
                }
            }
            let inv = ScalarFrac::one().div(self.at(row, col));
            for c in col..self.cols {
                let v = self.at(row, c).mul(&inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row || self.at(r, col).is_zero() {
                    continue;
                }
                let f = self.at(r, col).clone();
                for c in col..self.cols {
                    let v = self.at(r, c).sub(&f.mul(self.at(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        pivots
    }

    /// Basis of the right nullspace.
    pub fn nullspace(mut self) -> Vec<Vec<ScalarFrac>> {
        let cols = self.cols;
        let pivots = self.rref();
        let piv_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..cols {
            if piv_set.contains(&free) {
                continue;
            }
            let mut v = vec![ScalarFrac::zero(); cols];
            v[free] = ScalarFrac::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = self.at(prow, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve A·x = b; returns a particular solution (free variables set to 0)
    /// or None when inconsistent.
    pub fn solve(self, b: &[ScalarFrac]) -> Option<Vec<ScalarFrac>> {
        assert_eq!(b.len(), self.rows);
        let cols = self.cols;
        let mut aug = FracMatrix::zero(self.rows, cols + 1);
        for r in 0..self.rows {
            for c in 0..cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, cols, b[r].clone());
        }
        let pivots = aug.rref();
        // inconsistency: pivot in the augmented column
        if pivots.last() == Some(&cols) {
            return None;
        }
        let mut x = vec![ScalarFrac::zero(); cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = aug.at(prow, cols).clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> ScalarFrac {
        ScalarFrac::from_scalar(Scalar::from_int(n))
    }

    #[test]
    fn fraction_arithmetic_reduces() {
        let pi = ScalarFrac::from_scalar(Scalar::pi());
        let x = pi.div(&pi.add(&ScalarFrac::one()));
        let y = x.mul(&pi.add(&ScalarFrac::one()));
        assert_eq!(y, pi);
        assert_eq!(x.sub(&x), ScalarFrac::zero());
    }

    #[test]
    fn gcd_cancels_common_factor() {
        // (π² − 1)/(π − 1) = π + 1
        let pi = Scalar::pi();
        let num = &(&pi * &pi) - &Scalar::one();
        let den = &pi - &Scalar::one();
        let f = ScalarFrac::new(num, den);
        assert_eq!(f.as_polynomial().unwrap(), &pi + &Scalar::one());
    }

    #[test]
    fn solve_small_system() {
        // [1 2; 3 4]·x = [5; 6]  →  x = (−4, 9/2)
        let mut a = FracMatrix::zero(2, 2);
        a.set(0, 0, s(1));
        a.set(0, 1, s(2));
        a.set(1, 0, s(3));
        a.set(1, 1, s(4));
        let x = a.solve(&[s(5), s(6)]).unwrap();
        assert_eq!(x[0], s(-4));
        assert_eq!(x[1], ScalarFrac::from_scalar(Scalar::from_rat(9, 2)));
    }

    #[test]
    fn inconsistent_system_detected() {
        let mut a = FracMatrix::zero(2, 1);
        a.set(0, 0, s(1));
        a.set(1, 0, s(2));
        assert!(a.solve(&[s(1), s(3)]).is_none());
    }

    #[test]
    fn nullspace_dimension() {
        // x + y + z = 0 on three unknowns → 2-dimensional nullspace
        let mut a = FracMatrix::zero(1, 3);
        for c in 0..3 {
            a.set(0, c, s(1));
        }
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let sum = v.iter().fold(ScalarFrac::zero(), |acc, t| acc.add(t));
            assert!(sum.is_zero());
        }
    }
}
