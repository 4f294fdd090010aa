//! Exact coefficient arithmetic: Gaussian rationals and the ring ℚ(i)[π].
//!
//! Every constant that occurs in the local differential-geometric data handled
//! by this crate is a Gaussian-rational combination of powers of π (things like
//! `q`, `i·q`, `2πi·q`).  Keeping π formal makes all algebraic identity checks
//! exact; π only collapses to a double at numeric evaluation time.

use num::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rat = BigRational;

/// A Gaussian rational a + b·i with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(rat(n, 1), Rat::zero())
    }

    pub fn from_rat(num: i64, den: i64) -> Self {
        GaussRat::new(rat(num, den), Rat::zero())
    }

    pub fn zero() -> Self {
        GaussRat::from_int(0)
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    pub fn i() -> Self {
        GaussRat::new(Rat::zero(), Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// True iff the value is a (rational) integer on the real axis.
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        assert!(!n.is_zero(), "division by zero GaussRat");
        GaussRat::new(&self.re / &n, -&self.im / &n)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

/// Lossless-enough conversion of a big rational to f64 (numerator/denominator
/// both reduced modulo a shared power of two first so huge intermediates do not
/// overflow the double range).
pub fn rat_to_f64(r: &Rat) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Fall back to a scaled division for extreme magnitudes.
    let bits = r.numer().bits().max(r.denom().bits()) as i64 - 500;
    let shift = bits.max(0) as u64;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else {
            write!(f, "({}+{}i)", self.re, self.im)
        }
    }
}

/// An element of ℚ(i)[π]: `c[k]` is the coefficient of πᵏ.
///
/// Invariant: no trailing zero coefficients (so the zero element is the empty
/// vector and equality is structural).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    c: Vec<GaussRat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { c: Vec::new() }
    }

    pub fn one() -> Self {
        Scalar::from_gauss(GaussRat::one())
    }

    pub fn i() -> Self {
        Scalar::from_gauss(GaussRat::i())
    }

    pub fn pi() -> Self {
        Scalar {
            c: vec![GaussRat::zero(), GaussRat::one()],
        }
    }

    /// 2πi, the ubiquitous curving/curvature prefactor.
    pub fn two_pi_i() -> Self {
        Scalar {
            c: vec![GaussRat::zero(), GaussRat::new(Rat::zero(), rat(2, 1))],
        }
    }

    pub fn from_gauss(g: GaussRat) -> Self {
        let mut s = Scalar { c: vec![g] };
        s.normalize();
        s
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_gauss(GaussRat::from_int(n))
    }

    pub fn from_rat(num: i64, den: i64) -> Self {
        Scalar::from_gauss(GaussRat::from_rat(num, den))
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.c
    }

    pub fn from_coeffs(c: Vec<GaussRat>) -> Self {
        let mut s = Scalar { c };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        while self.c.last().is_some_and(GaussRat::is_zero) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree in π (zero polynomial reports 0).
    pub fn pi_degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// True iff the value is an integer constant (π-free, real, integral).
    pub fn is_integer_constant(&self) -> bool {
        match self.c.len() {
            0 => true,
            1 => self.c[0].is_integer(),
            _ => false,
        }
    }

    /// The constant (π⁰) coefficient.
    pub fn constant_part(&self) -> GaussRat {
        self.c.first().cloned().unwrap_or_else(GaussRat::zero)
    }

    /// True iff the value is π-free.
    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn conj(&self) -> Self {
        Scalar::from_coeffs(self.c.iter().map(GaussRat::conj).collect())
    }

    pub fn scale(&self, g: &GaussRat) -> Self {
        Scalar::from_coeffs(self.c.iter().map(|a| a * g).collect())
    }

    /// Numeric collapse at π = the double-precision constant.
    pub fn eval(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        // Horner in π keeps the evaluation well conditioned.
        for g in self.c.iter().rev() {
            acc = acc * std::f64::consts::PI + g.to_complex();
        }
        acc
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let n = self.c.len().max(rhs.c.len());
        let zero = GaussRat::zero();
        let c = (0..n)
            .map(|k| self.c.get(k).unwrap_or(&zero) + rhs.c.get(k).unwrap_or(&zero))
            .collect();
        Scalar::from_coeffs(c)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::from_coeffs(self.c.iter().map(|g| -g).collect())
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        let mut c = vec![GaussRat::zero(); self.c.len() + rhs.c.len() - 1];
        for (j, a) in self.c.iter().enumerate() {
            for (k, b) in rhs.c.iter().enumerate() {
                c[j + k] = &c[j + k] + &(a * b);
            }
        }
        Scalar::from_coeffs(c)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, g) in self.c.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{g:?}")?,
                1 => write!(f, "{g:?}·π")?,
                _ => write!(f, "{g:?}·π^{k}")?,
            }
        }
        Ok(())
    }
}

// JSON shape: a Scalar is an array of {re:[num,den], im:[num,den]} ordered by
// π-power; num/den are JSON integers when they fit in i64 and decimal strings
// otherwise.

fn bigint_to_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(n.to_string()),
    }
}

fn bigint_from_json(v: &serde_json::Value) -> Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("integer out of range: {n}")),
        serde_json::Value::String(s) => s.parse().map_err(|e| format!("bad integer {s:?}: {e}")),
        other => Err(format!("expected integer, got {other}")),
    }
}

fn rat_to_json(r: &Rat) -> serde_json::Value {
    serde_json::Value::Array(vec![bigint_to_json(r.numer()), bigint_to_json(r.denom())])
}

fn rat_from_json(v: &serde_json::Value) -> Result<Rat, String> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| format!("expected [num,den], got {v}"))?;
    let num = bigint_from_json(&arr[0])?;
    let den = bigint_from_json(&arr[1])?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rat::new(num, den))
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let arr: Vec<serde_json::Value> = self
            .c
            .iter()
            .map(|g| {
                serde_json::json!({
                    "re": rat_to_json(&g.re),
                    "im": rat_to_json(&g.im),
                })
            })
            .collect();
        serde_json::Value::Array(arr).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(de)?;
        let arr = raw
            .as_array()
            .ok_or_else(|| D::Error::custom("Scalar must be an array of coefficients"))?;
        let mut c = Vec::with_capacity(arr.len());
        for item in arr {
            let re = item
                .get("re")
                .ok_or_else(|| D::Error::custom("missing re"))
                .and_then(|v| rat_from_json(v).map_err(D::Error::custom))?;
            let im = item
                .get("im")
                .ok_or_else(|| D::Error::custom("missing im"))
                .and_then(|v| rat_from_json(v).map_err(D::Error::custom))?;
            c.push(GaussRat::new(re, im));
        }
        Ok(Scalar::from_coeffs(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_normalization() {
        let a = Scalar::from_coeffs(vec![GaussRat::one(), GaussRat::zero(), GaussRat::zero()]);
        assert_eq!(a, Scalar::one());
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn mul_matches_eval() {
        let a = &Scalar::two_pi_i() * &Scalar::pi();
        let expect = Complex64::new(0.0, 2.0 * std::f64::consts::PI * std::f64::consts::PI);
        assert!((a.eval() - expect).norm() < 1e-12);
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_int(-1));
    }

    #[test]
    fn integer_constant_detection() {
        assert!(Scalar::from_int(3).is_integer_constant());
        assert!(Scalar::zero().is_integer_constant());
        assert!(!Scalar::from_rat(1, 2).is_integer_constant());
        assert!(!Scalar::pi().is_integer_constant());
        assert!(!Scalar::i().is_integer_constant());
    }

    #[test]
    fn serde_round_trip() {
        let a = &(&Scalar::two_pi_i() * &Scalar::pi()) + &Scalar::from_rat(-7, 3);
        let text = serde_json::to_string(&a).unwrap();
        let b: Scalar = serde_json::from_str(&text).unwrap();
        assert_eq!(a, b);
    }
}
