//! Dense complex matrices in double precision: the workhorse for the
//! constant-coefficient morphism regime (unitarity and cocycle checks,
//! kernels, Hermitian eigendecomposition).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A row-major dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<(f64, f64)>,
}

impl CMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// A diagonal matrix from the given entries.
    pub fn diagonal(d: &[Complex64]) -> Self {
        CMat::from_fn(d.len(), d.len(), |r, c| {
            if r == c {
                d[r]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let (re, im) = self.data[r * self.cols + c];
        Complex64::new(re, im)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = (v.re, v.im);
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |r, c| self.get(r, c) + rhs.get(r, c))
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |r, c| self.get(r, c) - rhs.get(r, c))
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat::from_fn(self.rows, self.cols, |r, c| self.get(r, c) * s)
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut m = CMat::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    m.set(r, c, m.get(r, c) + a * rhs.get(k, c));
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn conj(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |r, c| self.get(r, c).conj())
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|(re, im)| re * re + im * im)
            .sum::<f64>()
            .sqrt()
    }

    /// Kronecker product: (A⊗B)[(r·p+i),(c·q+j)] = A[r,c]·B[i,j].
    pub fn kron(&self, rhs: &CMat) -> CMat {
        let (p, q) = (rhs.rows, rhs.cols);
        CMat::from_fn(self.rows * p, self.cols * q, |r, c| {
            self.get(r / p, c / q) * rhs.get(r % p, c % q)
        })
    }

    /// Block-diagonal direct sum.
    pub fn block_diag(&self, rhs: &CMat) -> CMat {
        CMat::from_fn(self.rows + rhs.rows, self.cols + rhs.cols, |r, c| {
            if r < self.rows && c < self.cols {
                self.get(r, c)
            } else if r >= self.rows && c >= self.cols {
                rhs.get(r - self.rows, c - self.cols)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// The submatrix built from the given column vectors (as columns).
    pub fn from_columns(rows: usize, cols: &[Vec<Complex64>]) -> CMat {
        CMat::from_fn(rows, cols.len(), |r, c| cols[c][r])
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn determinant(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| {
                    a.get(i, k)
                        .norm()
                        .partial_cmp(&a.get(j, k).norm())
                        .unwrap()
                })
                .unwrap();
            if a.get(pivot, k).norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != k {
                for c in 0..n {
                    let tmp = a.get(k, c);
                    a.set(k, c, a.get(pivot, c));
                    a.set(pivot, c, tmp);
                }
                det = -det;
            }
            let p = a.get(k, k);
            det *= p;
            for i in k + 1..n {
                let f = a.get(i, k) / p;
                for c in k..n {
                    a.set(i, c, a.get(i, c) - f * a.get(k, c));
                }
            }
        }
        det
    }

    /// An orthonormal basis of the (numerical) kernel, columns of the result;
    /// singular directions are detected against `tol` relative to the largest
    /// row norm.
    pub fn kernel_basis(&self, tol: f64) -> Vec<Vec<Complex64>> {
        let mut a = self.clone();
        let scale = a.frobenius_norm().max(1.0);
        let (m, n) = (a.rows, a.cols);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            let pivot = (row..m)
                .max_by(|&i, &j| {
                    a.get(i, col)
                        .norm()
                        .partial_cmp(&a.get(j, col).norm())
                        .unwrap()
                })
                .filter(|&i| a.get(i, col).norm() > tol * scale);
            let Some(p) = pivot else { continue };
            if p != row {
                for c in 0..n {
                    let tmp = a.get(row, c);
                    a.set(row, c, a.get(p, c));
                    a.set(p, c, tmp);
                }
            }
            let inv = Complex64::new(1.0, 0.0) / a.get(row, col);
            for c in 0..n {
                a.set(row, c, a.get(row, c) * inv);
            }
            for i in 0..m {
                if i != row {
                    let f = a.get(i, col);
                    if f.norm() > 0.0 {
                        for c in 0..n {
                            a.set(i, c, a.get(i, c) - f * a.get(row, c));
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == m {
                break;
            }
        }
        // free columns parameterize the kernel
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        for free in 0..n {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[free] = Complex64::new(1.0, 0.0);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a.get(r, free);
            }
            basis.push(v);
        }
        gram_schmidt(&mut basis);
        basis
    }

    /// Matrix exponential by scaling-and-squaring with a Taylor core.
    pub fn expm(&self) -> CMat {
        assert_eq!(self.rows, self.cols);
        let norm = self.frobenius_norm();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = self.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));
        let mut sum = CMat::identity(self.rows);
        let mut term = CMat::identity(self.rows);
        for k in 1..=24 {
            term = term.mul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
            if term.frobenius_norm() < 1e-17 * sum.frobenius_norm().max(1.0) {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Eigendecomposition of a Hermitian matrix by the cyclic Jacobi method:
    /// returns (eigenvalues, unitary U with eigenvectors as columns) such that
    /// U·diag(λ)·U* ≈ self.  Panics if the input is not square.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMat) {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut u = CMat::identity(n);
        for _sweep in 0..60 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a.get(p, q).norm_sqr();
                }
            }
            if off.sqrt() < 1e-13 * self.frobenius_norm().max(1.0) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    if apq.norm() < 1e-300 {
                        continue;
                    }
                    // Unitary 2×2 rotation annihilating the (p,q) entry of a
                    // Hermitian matrix: factor out the phase, then a real
                    // Jacobi rotation.
                    let app = a.get(p, p).re;
                    let aqq = a.get(q, q).re;
                    let phase = apq / apq.norm();
                    let theta = 0.5 * (2.0 * apq.norm()).atan2(app - aqq);
                    let (c, s) = (theta.cos(), theta.sin());
                    // columns p,q of the accumulated rotation
                    let cp = Complex64::new(c, 0.0);
                    let sp = phase * s;
                    // apply R* A R with R = [[c, -conj(phase)·s],[phase·s, c]]
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, akp * cp + akq * sp.conj());
                        a.set(k, q, -akp * sp + akq * cp);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, apk * cp + aqk * sp);
                        a.set(q, k, -apk * sp.conj() + aqk * cp);
                    }
                    for k in 0..n {
                        let ukp = u.get(k, p);
                        let ukq = u.get(k, q);
                        u.set(k, p, ukp * cp + ukq * sp.conj());
                        u.set(k, q, -ukp * sp + ukq * cp);
                    }
                }
            }
        }
        let eigs = (0..n).map(|i| a.get(i, i).re).collect();
        (eigs, u)
    }
}

/// In-place modified Gram–Schmidt; drops vectors that become numerically zero.
fn gram_schmidt(vecs: &mut Vec<Vec<Complex64>>) {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for v in vecs.iter() {
        let mut w = v.clone();
        for b in &out {
            let proj: Complex64 = b.iter().zip(&w).map(|(bi, wi)| bi.conj() * wi).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for wi in w.iter_mut() {
                *wi /= norm;
            }
            out.push(w);
        }
    }
    *vecs = out;
}

impl std::fmt::Debug for CMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self.get(r, c);
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_adjoint() {
        let a = CMat::from_fn(2, 2, |r, cc| c((r + 1) as f64, cc as f64));
        let b = a.adjoint();
        let p = a.mul(&b);
        // p is Hermitian positive semidefinite
        assert!(p.sub(&p.adjoint()).frobenius_norm() < 1e-12);
        assert!(p.trace().re > 0.0);
    }

    #[test]
    fn kron_shapes_and_identity() {
        let a = CMat::identity(2);
        let b = CMat::identity(3);
        assert_eq!(a.kron(&b), CMat::identity(6));
        let m = CMat::from_fn(2, 2, |r, cc| c((2 * r + cc) as f64, 0.0));
        let k = m.kron(&b);
        assert_eq!(k.rows(), 6);
        assert_eq!(k.get(3, 0), m.get(1, 0));
    }

    #[test]
    fn determinant_examples() {
        let m = CMat::from_fn(2, 2, |r, cc| match (r, cc) {
            (0, 0) => c(1.0, 0.0),
            (0, 1) => c(2.0, 0.0),
            (1, 0) => c(3.0, 0.0),
            _ => c(4.0, 0.0),
        });
        assert!((m.determinant() - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((CMat::identity(4).determinant() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn kernel_of_projection() {
        // diag(1, 0) has kernel spanned by e2
        let m = CMat::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let k = m.kernel_basis(1e-10);
        assert_eq!(k.len(), 1);
        assert!((k[0][1].norm() - 1.0).abs() < 1e-12);
        assert!(k[0][0].norm() < 1e-12);
        // invertible matrix has trivial kernel
        assert!(CMat::identity(3).kernel_basis(1e-10).is_empty());
    }

    #[test]
    fn hermitian_eigen_recomposes() {
        // a Hermitian matrix with known spectrum {1, 3}
        let m = CMat::from_fn(2, 2, |r, cc| match (r, cc) {
            (0, 0) => c(2.0, 0.0),
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, -1.0),
            _ => c(2.0, 0.0),
        });
        let (eigs, u) = m.hermitian_eigen();
        let mut sorted = eigs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((sorted[0] - 1.0).abs() < 1e-10);
        assert!((sorted[1] - 3.0).abs() < 1e-10);
        let d = CMat::diagonal(&eigs.iter().map(|&e| c(e, 0.0)).collect::<Vec<_>>());
        let re = u.mul(&d).mul(&u.adjoint());
        assert!(re.sub(&m).frobenius_norm() < 1e-10);
        // U unitary
        assert!(u.mul(&u.adjoint()).sub(&CMat::identity(2)).frobenius_norm() < 1e-10);
    }
}
