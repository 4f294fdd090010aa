//! Seeded random generators shared by the property suites: polynomials, forms,
//! covers, cochains, gerbes, loops, and unitary matrices.

use crate::cech_deligne::cech::{CechCochain, CochainValue, Cover, U1Function, ValueKind};
use crate::cech_deligne::deligne::{gauge_shift, DeligneCochain};
use crate::exterior::{Poly, PolyForm, Scalar, VectorField};
use crate::loopspace::SampledLoop;
use crate::rng::small_rational;
use crate::twovect::CMat;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;

/// A small nonzero rational scalar.
pub fn random_scalar(rng: &mut ChaCha20Rng) -> Scalar {
    loop {
        let s = Scalar::from_gauss(crate::exterior::GaussRat::new(
            small_rational(rng),
            num_traits::Zero::zero(),
        ));
        if !s.is_zero() {
            return s;
        }
    }
}

/// A random polynomial with 1–3 monomials of total degree ≤ `max_deg`.
pub fn random_poly(rng: &mut ChaCha20Rng, dim: usize, max_deg: u32) -> Poly {
    let mut p = Poly::zero(dim);
    for _ in 0..rng.gen_range(1..=3) {
        let mut exps = vec![0u32; dim];
        let mut budget = max_deg;
        for e in exps.iter_mut() {
            let step = rng.gen_range(0..=budget);
            *e = step;
            budget -= step;
        }
        p.add_term(exps, random_scalar(rng));
    }
    p
}

/// A random `degree`-form with polynomial coefficients of degree ≤ `max_deg`.
pub fn random_form(rng: &mut ChaCha20Rng, dim: usize, degree: usize, max_deg: u32) -> PolyForm {
    assert!(degree <= dim);
    let mut form = PolyForm::zero(dim, degree);
    for _ in 0..rng.gen_range(1..=3) {
        let mut idx: Vec<u8> = (0..dim as u8).collect();
        for j in 0..degree {
            let pick = rng.gen_range(j..idx.len());
            idx.swap(j, pick);
        }
        let mut idx: Vec<u8> = idx[..degree].to_vec();
        idx.sort_unstable();
        form.add_term(idx, random_poly(rng, dim, max_deg));
    }
    form
}

/// A random polynomial vector field with components of degree ≤ `max_deg`.
pub fn random_field(rng: &mut ChaCha20Rng, dim: usize, max_deg: u32) -> VectorField {
    VectorField::new((0..dim).map(|_| random_poly(rng, dim, max_deg)).collect())
}

/// A random U(1) function exp(2πi·q) with a polynomial exponent.
pub fn random_u1(rng: &mut ChaCha20Rng, dim: usize) -> U1Function {
    U1Function::from_exponent(random_poly(rng, dim, 2))
}

/// A random cover of ℝ^dim with up to `max_patches` patches and a random
/// downward-closed nerve.
pub fn random_cover(rng: &mut ChaCha20Rng, dim: usize, max_patches: usize) -> Cover {
    let n = rng.gen_range(2..=max_patches.max(2));
    let labels = (0..n).map(|a| format!("u{a}")).collect();
    let mut nerve: Vec<Vec<usize>> = Vec::new();
    let mut present: std::collections::BTreeSet<Vec<usize>> =
        (0..n).map(|a| vec![a]).collect();
    for size in 2..=n.min(4) {
        let mut tuple = vec![0usize; size];
        fill_tuples(&mut tuple, 0, 0, n, &mut |t: &[usize]| {
            let faces_ok = (0..size).all(|j| {
                let mut f = t.to_vec();
                f.remove(j);
                present.contains(&f)
            });
            if faces_ok && rng.gen_bool(0.6) {
                present.insert(t.to_vec());
                nerve.push(t.to_vec());
            }
        });
    }
    Cover::build(dim, labels, nerve).expect("generated nerve is downward closed")
}

fn fill_tuples(
    tuple: &mut Vec<usize>,
    pos: usize,
    start: usize,
    n: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos == tuple.len() {
        visit(tuple);
        return;
    }
    for v in start..n {
        tuple[pos] = v;
        fill_tuples(tuple, pos + 1, v + 1, n, visit);
    }
}

/// A random Čech cochain of the given degree and value kind.
pub fn random_cech_cochain(
    rng: &mut ChaCha20Rng,
    cover: &Cover,
    k: usize,
    kind: ValueKind,
) -> CechCochain {
    let dim = cover.dim();
    let entries: BTreeMap<Vec<usize>, CochainValue> = cover
        .simplices(k)
        .into_iter()
        .map(|s| {
            let v = match &kind {
                ValueKind::U1 => CochainValue::U1(random_u1(rng, dim)),
                ValueKind::Form { degree } => {
                    CochainValue::Form(random_form(rng, dim, *degree, 2))
                }
            };
            (s, v)
        })
        .collect();
    CechCochain::new(cover.clone(), k, kind, entries).expect("generated entries are complete")
}

/// A random Deligne k-cochain of the degree-n complex.
pub fn random_deligne_cochain(
    rng: &mut ChaCha20Rng,
    cover: &Cover,
    n: usize,
    k: usize,
) -> DeligneCochain {
    let components = (0..=k.min(n))
        .map(|j| {
            let kind = if j == 0 {
                ValueKind::U1
            } else {
                ValueKind::Form { degree: j }
            };
            random_cech_cochain(rng, cover, k - j, kind)
        })
        .collect();
    DeligneCochain::new(n, k, components).expect("generated components align")
}

/// Raw gerbe data (g, A, B) over a cover: a randomly gauge-shifted constant
/// curving, optionally broken by perturbing one layer.
#[allow(clippy::type_complexity)]
pub fn random_gerbe_data(
    rng: &mut ChaCha20Rng,
    cover: &Cover,
    broken: bool,
) -> (
    BTreeMap<Vec<usize>, U1Function>,
    BTreeMap<Vec<usize>, PolyForm>,
    BTreeMap<Vec<usize>, PolyForm>,
) {
    let dim = cover.dim();
    // trivial cocycle with a global random curving
    let rho = random_form(rng, dim, 2, 2);
    let g0 = CechCochain::zero(cover.clone(), 2, ValueKind::U1);
    let a0 = CechCochain::zero(cover.clone(), 1, ValueKind::Form { degree: 1 });
    let b_entries: BTreeMap<Vec<usize>, CochainValue> = cover
        .simplices(0)
        .into_iter()
        .map(|s| (s, CochainValue::Form(rho.clone())))
        .collect();
    let b0 = CechCochain::new(
        cover.clone(),
        0,
        ValueKind::Form { degree: 2 },
        b_entries,
    )
    .expect("complete");
    let trivial = DeligneCochain::new(2, 2, vec![g0, a0, b0]).expect("degrees align");
    let gauge = random_deligne_cochain(rng, cover, 2, 1);
    let shifted = gauge_shift(&trivial, &gauge).expect("matching covers");

    let mut g: BTreeMap<Vec<usize>, U1Function> = shifted.components[0]
        .entries()
        .map(|(s, v)| (s.clone(), v.as_u1().clone()))
        .collect();
    let mut a: BTreeMap<Vec<usize>, PolyForm> = shifted.components[1]
        .entries()
        .map(|(s, v)| (s.clone(), v.as_form().clone()))
        .collect();
    let mut b: BTreeMap<Vec<usize>, PolyForm> = shifted.components[2]
        .entries()
        .map(|(s, v)| (s.clone(), v.as_form().clone()))
        .collect();

    if broken {
        let layer = rng.gen_range(0..3);
        if layer == 0 && !g.is_empty() {
            let key = pick_key(rng, &g);
            let u = g.get_mut(&key).expect("picked key");
            *u = u.mul(&U1Function::from_exponent(random_poly(rng, dim, 2)));
        } else if layer == 1 && !a.is_empty() {
            let key = pick_key(rng, &a);
            let f = a.get_mut(&key).expect("picked key");
            *f = &*f + &random_form(rng, dim, 1, 2);
        } else {
            let key = pick_key(rng, &b);
            let f = b.get_mut(&key).expect("picked key");
            *f = &*f + &random_form(rng, dim, 2, 2);
        }
    }
    (g, a, b)
}

fn pick_key<V>(rng: &mut ChaCha20Rng, map: &BTreeMap<Vec<usize>, V>) -> Vec<usize> {
    let keys: Vec<&Vec<usize>> = map.keys().collect();
    keys[rng.gen_range(0..keys.len())].clone()
}

/// Assemble raw gerbe data into an (unvalidated) Deligne 2-cochain.
pub fn assemble_deligne(
    cover: &Cover,
    g: &BTreeMap<Vec<usize>, U1Function>,
    a: &BTreeMap<Vec<usize>, PolyForm>,
    b: &BTreeMap<Vec<usize>, PolyForm>,
) -> DeligneCochain {
    let gc = CechCochain::new(
        cover.clone(),
        2,
        ValueKind::U1,
        g.iter()
            .map(|(s, u)| (s.clone(), CochainValue::U1(u.clone())))
            .collect(),
    )
    .expect("complete g data");
    let ac = CechCochain::new(
        cover.clone(),
        1,
        ValueKind::Form { degree: 1 },
        a.iter()
            .map(|(s, f)| (s.clone(), CochainValue::Form(f.clone())))
            .collect(),
    )
    .expect("complete A data");
    let bc = CechCochain::new(
        cover.clone(),
        0,
        ValueKind::Form { degree: 2 },
        b.iter()
            .map(|(s, f)| (s.clone(), CochainValue::Form(f.clone())))
            .collect(),
    )
    .expect("complete B data");
    DeligneCochain::new(2, 2, vec![gc, ac, bc]).expect("degrees align")
}

/// A random complex number with entries in [−1, 1].
pub fn random_complex(rng: &mut ChaCha20Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// A Haar-ish random unitary: exp of a random anti-hermitian matrix.
pub fn random_unitary(rng: &mut ChaCha20Rng, n: usize) -> CMat {
    let raw = CMat::from_fn(n, n, |_, _| random_complex(rng));
    let anti = raw
        .sub(&raw.adjoint())
        .scale(Complex64::new(0.5, 0.0));
    anti.expm()
}

/// A smooth random loop in ℝ³: a two-harmonic Fourier curve around the unit
/// circle, sampled at `n` points.
pub fn random_loop(rng: &mut ChaCha20Rng, n: usize) -> SampledLoop {
    let mut coeff = [[0.0f64; 5]; 3];
    for row in coeff.iter_mut() {
        for c in row.iter_mut() {
            *c = rng.gen_range(-0.3..0.3);
        }
    }
    let samples = (0..n)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let base = [t.cos(), t.sin(), 0.0];
            (0..3)
                .map(|i| {
                    base[i]
                        + coeff[i][0]
                        + coeff[i][1] * t.cos()
                        + coeff[i][2] * t.sin()
                        + coeff[i][3] * (2.0 * t).cos()
                        + coeff[i][4] * (2.0 * t).sin()
                })
                .collect()
        })
        .collect();
    SampledLoop::new(samples).expect("generated loop is valid")
}
