//! Morphisms between local gerbes over a common cover — twisted unitary
//! vector bundles with connection — together with their 2-morphisms, kernels
//! and eigenspace splittings in the constant-coefficient regime.

use super::cmat::CMat;
use super::matform::{MatForm, MatPoly};
use super::TwovectError;
use crate::exterior::scalar::{rat, GaussRat, Rat};
use crate::exterior::{Poly, Scalar};
use crate::gerbe::LocalGerbe;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Unitarity / cocycle / intertwining tolerance of the constant regime.
pub const TAU_U: f64 = 1e-9;
/// Eigenvalue clustering tolerance for `eigensplit`.
pub const TAU_EIG: f64 = 1e-7;

/// Sample points at which the U(1) twist functions are evaluated when checking
/// the twisted cocycle numerically.
fn twist_sample_points(dim: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; dim]];
    let mut rng = crate::rng::seeded_rng(0x2BEC);
    for _ in 0..2 {
        pts.push(
            (0..dim)
                .map(|_| {
                    let q = crate::rng::small_rational(&mut rng);
                    crate::exterior::scalar::rat_to_f64(&q)
                })
                .collect(),
        );
    }
    pts
}

/// A 1-morphism 𝓛₁ → 𝓛₂ of local gerbes over their common cover: a rank-n
/// twisted unitary bundle with transition matrices α_ab per double overlap and
/// an anti-hermitian matrix-valued connection 1-form a_a per patch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GerbeMorphism {
    src: LocalGerbe,
    tgt: LocalGerbe,
    rank: usize,
    alpha: BTreeMap<Vec<usize>, CMat>,
    a: BTreeMap<usize, MatForm>,
}

impl GerbeMorphism {
    pub fn source(&self) -> &LocalGerbe {
        &self.src
    }

    pub fn target(&self) -> &LocalGerbe {
        &self.tgt
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn transition(&self, pair: &[usize]) -> &CMat {
        &self.alpha[pair]
    }

    pub fn connection(&self, patch: usize) -> &MatForm {
        &self.a[&patch]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&Vec<usize>, &CMat)> {
        self.alpha.iter()
    }

    pub fn connections(&self) -> impl Iterator<Item = (&usize, &MatForm)> {
        self.a.iter()
    }
}

/// Validate and build a morphism: unitarity of every α_ab, the twisted cocycle
/// g₂·α_ab·α_bc = α_ac·g₁ on triples, and the connection compatibility
/// A₁_ab + a_b = Ad(α_ab⁻¹)(A₂_ab + a_a) per double overlap (transitions are
/// constant, so the α⁻¹dα term vanishes).
pub fn make_morphism(
    l1: &LocalGerbe,
    l2: &LocalGerbe,
    alpha: BTreeMap<Vec<usize>, CMat>,
    a: BTreeMap<usize, MatForm>,
) -> Result<GerbeMorphism, TwovectError> {
    if l1.cover() != l2.cover() {
        return Err(TwovectError::GerbeMismatch {
            detail: "source and target gerbes live over different covers".into(),
        });
    }
    let cover = l1.cover();
    let dim = l1.dim();
    let patches = cover.simplices(0);
    let rank = a
        .get(&0)
        .map(MatForm::rows)
        .or_else(|| alpha.values().next().map(CMat::rows))
        .ok_or_else(|| TwovectError::InvalidData {
            detail: "morphism carries no data".into(),
        })?;
    for patch in &patches {
        let conn = a.get(&patch[0]).ok_or_else(|| TwovectError::InvalidData {
            detail: format!("missing connection on patch {}", patch[0]),
        })?;
        if conn.rows() != rank || conn.cols() != rank || conn.degree() != 1 || conn.dim() != dim {
            return Err(TwovectError::InvalidData {
                detail: format!("connection on patch {} has the wrong shape", patch[0]),
            });
        }
        if !conn.is_anti_hermitian() {
            return Err(TwovectError::InvalidData {
                detail: format!("connection on patch {} is not anti-hermitian", patch[0]),
            });
        }
    }
    for pair in cover.simplices(1) {
        let t = alpha.get(&pair).ok_or_else(|| TwovectError::InvalidData {
            detail: format!("missing transition on overlap {pair:?}"),
        })?;
        if t.rows() != rank || t.cols() != rank {
            return Err(TwovectError::InvalidData {
                detail: format!("transition on overlap {pair:?} has the wrong shape"),
            });
        }
        let residual = t.adjoint().mul(t).sub(&CMat::identity(rank)).frobenius_norm();
        if residual > TAU_U {
            return Err(TwovectError::UnitarityFail {
                pair: pair.clone(),
                residual,
            });
        }
    }
    let points = twist_sample_points(dim);
    for triple in cover.simplices(2) {
        let (p, q, r) = (triple[0], triple[1], triple[2]);
        let ab = &alpha[&vec![p, q]];
        let bc = &alpha[&vec![q, r]];
        let ac = &alpha[&vec![p, r]];
        let g1 = l1.g(&triple);
        let g2 = l2.g(&triple);
        for x in &points {
            let lhs = ab.mul(bc).scale(g2.eval_f64(x));
            let rhs = ac.scale(g1.eval_f64(x));
            let residual = lhs.sub(&rhs).frobenius_norm();
            if residual > TAU_U {
                return Err(TwovectError::TwistedCocycleFail {
                    simplex: triple.clone(),
                    residual,
                });
            }
        }
    }
    let m = GerbeMorphism {
        src: l1.clone(),
        tgt: l2.clone(),
        rank,
        alpha,
        a,
    };
    for pair in cover.simplices(1) {
        let residual = m.connection_residual(&pair);
        if residual > TAU_U {
            return Err(TwovectError::ConnectionFail {
                pair: pair.clone(),
                residual,
            });
        }
    }
    Ok(m)
}

impl GerbeMorphism {
    /// Numeric size of A₁_ab + a_b − Ad(α⁻¹)(A₂_ab + a_a), coefficient by
    /// coefficient.
    fn connection_residual(&self, pair: &[usize]) -> f64 {
        let (pa, pb) = (pair[0], pair[1]);
        let alpha = &self.alpha[pair];
        let ai = alpha.adjoint();
        let lhs = MatForm::scalar(self.rank, self.src.connection(pair)).add(&self.a[&pb]);
        let rhs_form = MatForm::scalar(self.rank, self.tgt.connection(pair)).add(&self.a[&pa]);
        let mut support = lhs.support();
        support.extend(rhs_form.support());
        let mut worst: f64 = 0.0;
        for (idx, exps) in support {
            let l = lhs.coefficient_matrix(&idx, &exps);
            let r = ai.mul(&rhs_form.coefficient_matrix(&idx, &exps)).mul(alpha);
            worst = worst.max(l.sub(&r).frobenius_norm());
        }
        worst
    }

    /// The identity morphism of a gerbe: rank 1, trivial transitions, zero
    /// connection.
    pub fn identity(l: &LocalGerbe) -> GerbeMorphism {
        let cover = l.cover();
        let alpha = cover
            .simplices(1)
            .into_iter()
            .map(|p| (p, CMat::identity(1)))
            .collect();
        let a = cover
            .simplices(0)
            .into_iter()
            .map(|p| (p[0], MatForm::zero(1, 1, l.dim(), 1)))
            .collect();
        GerbeMorphism {
            src: l.clone(),
            tgt: l.clone(),
            rank: 1,
            alpha,
            a,
        }
    }
}

/// Composition 𝓛₁ →E 𝓛₂ →F 𝓛₃: Kronecker transitions α_F ⊗ α_E and the
/// sum-type connection a_F ⊗ 𝟙 + 𝟙 ⊗ a_E.
pub fn compose(f: &GerbeMorphism, e: &GerbeMorphism) -> Result<GerbeMorphism, TwovectError> {
    if f.src != e.tgt {
        return Err(TwovectError::GerbeMismatch {
            detail: "middle gerbe of the composition does not match".into(),
        });
    }
    let alpha = e
        .alpha
        .keys()
        .map(|p| (p.clone(), f.alpha[p].kron(&e.alpha[p])))
        .collect();
    let a = e
        .a
        .keys()
        .map(|&p| (p, f.a[&p].kron_sum(&e.a[&p])))
        .collect();
    make_morphism(&e.src, &f.tgt, alpha, a)
}

/// Direct sum of parallel morphisms: block-diagonal transitions and
/// connections; ranks add.
pub fn direct_sum(e: &GerbeMorphism, e2: &GerbeMorphism) -> Result<GerbeMorphism, TwovectError> {
    if e.src != e2.src || e.tgt != e2.tgt {
        return Err(TwovectError::GerbeMismatch {
            detail: "direct summands must share source and target gerbes".into(),
        });
    }
    let alpha = e
        .alpha
        .keys()
        .map(|p| (p.clone(), e.alpha[p].block_diag(&e2.alpha[p])))
        .collect();
    let a = e
        .a
        .keys()
        .map(|&p| (p, e.a[&p].block_diag(&e2.a[&p])))
        .collect();
    make_morphism(&e.src, &e.tgt, alpha, a)
}

/// External tensor of morphisms, between the tensor gerbes.
pub fn tensor_mor(e: &GerbeMorphism, f: &GerbeMorphism) -> Result<GerbeMorphism, TwovectError> {
    let src = e.src.tensor(&f.src).map_err(|err| TwovectError::GerbeMismatch {
        detail: format!("source tensor: {err}"),
    })?;
    let tgt = e.tgt.tensor(&f.tgt).map_err(|err| TwovectError::GerbeMismatch {
        detail: format!("target tensor: {err}"),
    })?;
    let alpha = e
        .alpha
        .keys()
        .map(|p| (p.clone(), e.alpha[p].kron(&f.alpha[p])))
        .collect();
    let a = e
        .a
        .keys()
        .map(|&p| (p, e.a[&p].kron_sum(&f.a[&p])))
        .collect();
    make_morphism(&src, &tgt, alpha, a)
}

/// The Riesz dual on 1-morphisms: α ↦ conj(α) (= α^{−t} for unitary data),
/// a ↦ −aᵗ, between the dual gerbes.  Involutive on the nose.
pub fn riesz_theta(e: &GerbeMorphism) -> Result<GerbeMorphism, TwovectError> {
    let alpha = e
        .alpha
        .iter()
        .map(|(p, m)| (p.clone(), m.conj()))
        .collect();
    let a = e
        .a
        .iter()
        .map(|(&p, m)| (p, m.transpose().neg()))
        .collect();
    make_morphism(&e.src.dual(), &e.tgt.dual(), alpha, a)
}

/// A 2-morphism φ: E ⇒ E′ between parallel 1-morphisms: one constant matrix
/// per patch intertwining the transitions and the connections.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoMorphism {
    src: GerbeMorphism,
    tgt: GerbeMorphism,
    phi: BTreeMap<usize, CMat>,
}

impl TwoMorphism {
    pub fn source(&self) -> &GerbeMorphism {
        &self.src
    }

    pub fn target(&self) -> &GerbeMorphism {
        &self.tgt
    }

    pub fn component(&self, patch: usize) -> &CMat {
        &self.phi[&patch]
    }

    pub fn components(&self) -> impl Iterator<Item = (&usize, &CMat)> {
        self.phi.iter()
    }

    pub fn identity(e: &GerbeMorphism) -> TwoMorphism {
        let phi = e
            .a
            .keys()
            .map(|&p| (p, CMat::identity(e.rank)))
            .collect();
        TwoMorphism {
            src: e.clone(),
            tgt: e.clone(),
            phi,
        }
    }

    /// Vertical composition ψ∘φ (this ∘ rhs applies rhs first).
    pub fn vertical(&self, rhs: &TwoMorphism) -> Result<TwoMorphism, TwovectError> {
        let phi = self
            .phi
            .keys()
            .map(|&p| (p, self.phi[&p].mul(&rhs.phi[&p])))
            .collect();
        verify_2morphism(&rhs.src, &self.tgt, phi)
    }

    /// Horizontal composition under `compose` of the underlying 1-morphisms.
    pub fn horizontal(&self, rhs: &TwoMorphism) -> Result<TwoMorphism, TwovectError> {
        let src = compose(&self.src, &rhs.src)?;
        let tgt = compose(&self.tgt, &rhs.tgt)?;
        let phi = self
            .phi
            .keys()
            .map(|&p| (p, self.phi[&p].kron(&rhs.phi[&p])))
            .collect();
        verify_2morphism(&src, &tgt, phi)
    }

    /// Blockwise direct sum of 2-morphisms.
    pub fn direct_sum(&self, rhs: &TwoMorphism) -> Result<TwoMorphism, TwovectError> {
        let src = direct_sum(&self.src, &rhs.src)?;
        let tgt = direct_sum(&self.tgt, &rhs.tgt)?;
        let phi = self
            .phi
            .keys()
            .map(|&p| (p, self.phi[&p].block_diag(&rhs.phi[&p])))
            .collect();
        verify_2morphism(&src, &tgt, phi)
    }
}

/// The Riesz dual on 2-morphisms: φ ↦ φᵗ, contravariantly.
pub fn riesz_theta_2mor(phi: &TwoMorphism) -> Result<TwoMorphism, TwovectError> {
    let src = riesz_theta(&phi.tgt)?;
    let tgt = riesz_theta(&phi.src)?;
    let comps = phi
        .phi
        .iter()
        .map(|(&p, m)| (p, m.transpose()))
        .collect();
    verify_2morphism(&src, &tgt, comps)
}

/// Check the intertwining condition α′_ab·φ_b = φ_a·α_ab on double overlaps
/// and the parallelism a′_a·φ_a = φ_a·a_a patchwise, both to `TAU_U`.
pub fn verify_2morphism(
    e: &GerbeMorphism,
    e2: &GerbeMorphism,
    phi: BTreeMap<usize, CMat>,
) -> Result<TwoMorphism, TwovectError> {
    if e.src != e2.src || e.tgt != e2.tgt {
        return Err(TwovectError::GerbeMismatch {
            detail: "2-morphism endpoints must share source and target gerbes".into(),
        });
    }
    for (&patch, m) in &phi {
        if m.rows() != e2.rank || m.cols() != e.rank {
            return Err(TwovectError::InvalidData {
                detail: format!("component on patch {patch} has the wrong shape"),
            });
        }
    }
    for pair in e.src.cover().simplices(1) {
        let (pa, pb) = (pair[0], pair[1]);
        let lhs = e2.alpha[&pair].mul(&phi[&pb]);
        let rhs = phi[&pa].mul(&e.alpha[&pair]);
        let residual = lhs.sub(&rhs).frobenius_norm();
        if residual > TAU_U {
            return Err(TwovectError::IntertwineFail {
                pair: pair.clone(),
                residual,
            });
        }
    }
    for (&patch, m) in &phi {
        let a1 = &e.a[&patch];
        let a2 = &e2.a[&patch];
        let mut support = a1.support();
        support.extend(a2.support());
        let mut worst: f64 = 0.0;
        for (idx, exps) in support {
            let lhs = a2.coefficient_matrix(&idx, &exps).mul(m);
            let rhs = m.mul(&a1.coefficient_matrix(&idx, &exps));
            worst = worst.max(lhs.sub(&rhs).frobenius_norm());
        }
        if worst > TAU_U {
            return Err(TwovectError::ParallelFail {
                patch,
                residual: worst,
            });
        }
    }
    Ok(TwoMorphism {
        src: e.clone(),
        tgt: e2.clone(),
        phi,
    })
}

/// Exact Gaussian-rational matrix equal to the given numeric matrix (each f64
/// is itself a rational number, so this conversion is lossless).
fn exact_from_cmat(m: &CMat, dim: usize) -> MatPoly {
    let mut out = MatPoly::zero(m.rows(), m.cols(), dim);
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let z = m.get(r, c);
            let re = Rat::from_float(z.re).unwrap_or_else(Rat::zero);
            let im = Rat::from_float(z.im).unwrap_or_else(Rat::zero);
            *out.at_mut(r, c) = Poly::constant(
                dim,
                Scalar::from_gauss(GaussRat::new(re, im)),
            );
        }
    }
    out
}

/// Sandwich an exact matrix form with numeric column matrices: u*·a·u, with
/// the numeric entries promoted losslessly to exact rationals.
fn sandwich(a: &MatForm, u: &CMat) -> MatForm {
    let ue = exact_from_cmat(u, a.dim());
    a.left_mul(&ue.adjoint()).right_mul(&ue)
}

/// Clean tiny imaginary/real dust from a sandwich so that anti-hermiticity is
/// restored exactly: replace a by (a − a*)/2.
fn anti_hermitize(a: &MatForm) -> MatForm {
    let half = Scalar::from_rat(1, 2);
    let diff = a.sub(&a.adjoint());
    MatForm::from_entries(
        a.rows(),
        a.cols(),
        a.dim(),
        a.degree(),
        diff.entries().iter().map(|f| f.scale(&half)).collect(),
    )
}

/// The kernel of a 2-morphism as a sub-1-morphism of its source: per patch an
/// orthonormal basis of ker φ_a, with the transitions and connection
/// compressed to the subspace.
pub fn kernel_2mor(phi: &TwoMorphism) -> Result<GerbeMorphism, TwovectError> {
    let e = &phi.src;
    let mut bases: BTreeMap<usize, CMat> = BTreeMap::new();
    let mut rank: Option<usize> = None;
    for (&patch, m) in &phi.phi {
        let basis = m.kernel_basis(TAU_U);
        match rank {
            None => rank = Some(basis.len()),
            Some(r) if r != basis.len() => {
                return Err(TwovectError::NonConstantRank {
                    detail: format!(
                        "kernel rank {} on patch {patch} differs from {r}",
                        basis.len()
                    ),
                })
            }
            _ => {}
        }
        bases.insert(patch, CMat::from_columns(e.rank, &basis));
    }
    let rank = rank.unwrap_or(0);
    if rank == 0 {
        // the zero morphism: empty-rank data degenerates, return rank-0 blocks
        let alpha = e
            .alpha
            .keys()
            .map(|p| (p.clone(), CMat::identity(0)))
            .collect();
        let a = e
            .a
            .keys()
            .map(|&p| (p, MatForm::zero(0, 0, e.src.dim(), 1)))
            .collect();
        return Ok(GerbeMorphism {
            src: e.src.clone(),
            tgt: e.tgt.clone(),
            rank: 0,
            alpha,
            a,
        });
    }
    let alpha = e
        .alpha
        .iter()
        .map(|(p, m)| {
            let ka = &bases[&p[0]];
            let kb = &bases[&p[1]];
            (p.clone(), ka.adjoint().mul(m).mul(kb))
        })
        .collect();
    let a = e
        .a
        .iter()
        .map(|(&p, m)| (p, anti_hermitize(&sandwich(m, &bases[&p]))))
        .collect();
    make_morphism(&e.src, &e.tgt, alpha, a)
}

/// One eigenspace summand of an endomorphism splitting.
#[derive(Clone, Debug)]
pub struct EigenPart {
    pub eigenvalue: Complex64,
    pub morphism: GerbeMorphism,
}

/// The result of `eigensplit`: the eigenvalue-indexed summands together with
/// the unitary 2-isomorphism reassembling their direct sum into the original
/// morphism.
#[derive(Clone, Debug)]
pub struct EigenSplit {
    pub parts: Vec<EigenPart>,
    pub reassembly: TwoMorphism,
}

/// Eigenvalues of a normal matrix with a joint unitary eigenbasis, obtained
/// by diagonalizing the commuting Hermitian and anti-Hermitian parts.
fn normal_eigen(m: &CMat) -> Result<(Vec<Complex64>, CMat), TwovectError> {
    let n = m.rows();
    let residual = m.mul(&m.adjoint()).sub(&m.adjoint().mul(m)).frobenius_norm();
    if residual > TAU_U {
        return Err(TwovectError::NotNormal { residual });
    }
    let half = Complex64::new(0.5, 0.0);
    let halfi = Complex64::new(0.0, -0.5);
    let h = m.add(&m.adjoint()).scale(half);
    let s = m.sub(&m.adjoint()).scale(halfi);
    let (eh, u) = h.hermitian_eigen();
    // refine within clusters of h-eigenvalues by diagonalizing s there
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eh[i].partial_cmp(&eh[j]).unwrap());
    let mut u_cols: Vec<Vec<Complex64>> = order.iter().map(|&i| u.column(i)).collect();
    let mut evals = vec![Complex64::new(0.0, 0.0); n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eh[order[end]] - eh[order[end - 1]]).abs() <= TAU_EIG {
            end += 1;
        }
        let block = CMat::from_columns(n, &u_cols[start..end].to_vec());
        let s_block = block.adjoint().mul(&s).mul(&block);
        let (es, v) = s_block.hermitian_eigen();
        let refined = block.mul(&v);
        for (k, slot) in (start..end).enumerate() {
            u_cols[slot] = refined.column(k);
            evals[slot] = Complex64::new(eh[order[start]], es[k]);
        }
        // use the averaged real part over the cluster for stability
        let avg: f64 = (start..end).map(|i| eh[order[i]]).sum::<f64>() / (end - start) as f64;
        for ev in evals.iter_mut().take(end).skip(start) {
            ev.re = avg;
        }
        start = end;
    }
    Ok((evals, CMat::from_columns(n, &u_cols)))
}

/// Split a parallel endomorphism 2-morphism into eigenvalue blocks: returns
/// the (eigenvalue, sub-morphism) summands sorted by (re, im) and the unitary
/// reassembly 2-isomorphism ⊕blocks ⇒ E.
pub fn eigensplit(phi: &TwoMorphism) -> Result<EigenSplit, TwovectError> {
    let e = &phi.src;
    if phi.src.rank != phi.tgt.rank {
        return Err(TwovectError::InvalidData {
            detail: "eigensplit requires an endomorphism".into(),
        });
    }
    // eigenvalues from the first patch fix the cluster structure
    let patches: Vec<usize> = phi.phi.keys().copied().collect();
    let mut per_patch: BTreeMap<usize, (Vec<Complex64>, CMat)> = BTreeMap::new();
    for &p in &patches {
        per_patch.insert(p, normal_eigen(&phi.phi[&p])?);
    }
    let (ref evals0, _) = per_patch[&patches[0]];
    // sort and cluster the eigenvalues of the first patch
    let mut sorted: Vec<Complex64> = evals0.clone();
    sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut clusters: Vec<Complex64> = Vec::new();
    for ev in &sorted {
        match clusters.last() {
            Some(last) if (ev - last).norm() <= TAU_EIG => {}
            _ => clusters.push(*ev),
        }
    }
    // per patch, group eigenvector columns by nearest cluster
    let mut grouped: BTreeMap<usize, Vec<CMat>> = BTreeMap::new();
    for &p in &patches {
        let (evals, u) = &per_patch[&p];
        let mut cols_per_cluster: Vec<Vec<Vec<Complex64>>> = vec![Vec::new(); clusters.len()];
        for (i, ev) in evals.iter().enumerate() {
            let (best, dist) = clusters
                .iter()
                .enumerate()
                .map(|(k, c)| (k, (ev - c).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            if dist > 10.0 * TAU_EIG {
                return Err(TwovectError::NonConstantRank {
                    detail: format!("eigenvalue {ev} on patch {p} matches no cluster"),
                });
            }
            cols_per_cluster[best].push(u.column(i));
        }
        let sizes: Vec<usize> = cols_per_cluster.iter().map(Vec::len).collect();
        let ref_sizes: Vec<usize> = {
            let (evals0, _) = &per_patch[&patches[0]];
            clusters
                .iter()
                .map(|c| evals0.iter().filter(|e| (*e - c).norm() <= 10.0 * TAU_EIG).count())
                .collect()
        };
        if sizes != ref_sizes {
            return Err(TwovectError::NonConstantRank {
                detail: format!("eigenspace dimensions differ on patch {p}"),
            });
        }
        grouped.insert(
            p,
            cols_per_cluster
                .into_iter()
                .map(|cols| CMat::from_columns(phi.phi[&p].rows(), &cols))
                .collect(),
        );
    }
    let mut parts = Vec::new();
    for (k, &lambda) in clusters.iter().enumerate() {
        let alpha = e
            .alpha
            .iter()
            .map(|(pair, m)| {
                let ua = &grouped[&pair[0]][k];
                let ub = &grouped[&pair[1]][k];
                (pair.clone(), ua.adjoint().mul(m).mul(ub))
            })
            .collect();
        let a = e
            .a
            .iter()
            .map(|(&p, m)| (p, anti_hermitize(&sandwich(m, &grouped[&p][k]))))
            .collect();
        let morphism = make_morphism(&e.src, &e.tgt, alpha, a)?;
        parts.push(EigenPart {
            eigenvalue: lambda,
            morphism,
        });
    }
    // reassembly: U_a = [U_a,λ1 | U_a,λ2 | …] intertwines ⊕blocks with E
    let mut sum = parts[0].morphism.clone();
    for part in &parts[1..] {
        sum = direct_sum(&sum, &part.morphism)?;
    }
    let u = patches
        .iter()
        .map(|&p| {
            let mut m = grouped[&p][0].clone();
            for k in 1..clusters.len() {
                m = CMat::from_fn(m.rows(), m.cols() + grouped[&p][k].cols(), |r, c| {
                    if c < m.cols() {
                        m.get(r, c)
                    } else {
                        grouped[&p][k].get(r, c - m.cols())
                    }
                });
            }
            (p, m)
        })
        .collect();
    let reassembly = verify_2morphism(&sum, e, u)?;
    Ok(EigenSplit { parts, reassembly })
}

/// The determinant line of a rank-n morphism: transitions det(α_ab) and
/// connection tr(a_a), a rank-1 morphism between the n-th tensor powers.
pub fn det_morphism(e: &GerbeMorphism) -> Result<GerbeMorphism, TwovectError> {
    let n = e.rank;
    if n == 0 {
        return Err(TwovectError::InvalidData {
            detail: "determinant of a rank-0 morphism".into(),
        });
    }
    let power = |l: &LocalGerbe| -> Result<LocalGerbe, TwovectError> {
        let mut acc = l.clone();
        for _ in 1..n {
            acc = acc.tensor(l).map_err(|err| TwovectError::GerbeMismatch {
                detail: format!("tensor power: {err}"),
            })?;
        }
        Ok(acc)
    };
    let src = power(&e.src)?;
    let tgt = power(&e.tgt)?;
    let alpha = e
        .alpha
        .iter()
        .map(|(p, m)| {
            let mut d = CMat::zero(1, 1);
            d.set(0, 0, m.determinant());
            (p.clone(), d)
        })
        .collect();
    let a = e
        .a
        .iter()
        .map(|(&p, m)| {
            (
                p,
                MatForm::from_entries(1, 1, m.dim(), 1, vec![m.trace()]),
            )
        })
        .collect();
    make_morphism(&src, &tgt, alpha, a)
}

/// Helper: a 1×1 transition matrix from a complex number.
pub fn scalar_mat(z: Complex64) -> CMat {
    let mut m = CMat::zero(1, 1);
    m.set(0, 0, z);
    m
}

/// Convenience: a rational constant matrix promoted to a `CMat`.
pub fn cmat_from_rational(rows: usize, cols: usize, entries: &[(i64, i64)]) -> CMat {
    assert_eq!(entries.len(), rows * cols);
    CMat::from_fn(rows, cols, |r, c| {
        let (num, den) = entries[r * cols + c];
        Complex64::new(crate::exterior::scalar::rat_to_f64(&rat(num, den)), 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech_deligne::cech::{Cover, U1Function};
    use crate::exterior::PolyForm;
    use crate::gerbe::{make_gerbe, prequantum_rho, TrivialGerbe};

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn i0() -> LocalGerbe {
        TrivialGerbe::new(PolyForm::zero(3, 2)).unwrap().as_gerbe()
    }

    fn cover3() -> Cover {
        Cover::build(
            3,
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]],
        )
        .unwrap()
    }

    /// A gerbe over the three-patch cover with constant twist exp(2πi·q) on
    /// the triple, flat connection data.
    fn flat_gerbe(qnum: i64, qden: i64) -> LocalGerbe {
        let cover = cover3();
        let mut g = BTreeMap::new();
        g.insert(
            vec![0, 1, 2],
            U1Function::from_exponent(Poly::constant(3, Scalar::from_rat(qnum, qden))),
        );
        let a = cover
            .simplices(1)
            .into_iter()
            .map(|p| (p, PolyForm::zero(3, 1)))
            .collect();
        let b = cover
            .simplices(0)
            .into_iter()
            .map(|p| (p, PolyForm::zero(3, 2)))
            .collect();
        make_gerbe(cover, g, a, b).unwrap()
    }

    fn u1_form() -> crate::exterior::PolyForm {
        PolyForm::term(3, vec![1], Poly::var(3, 0)).scale(&Scalar::two_pi_i())
    }

    /// A rank-1 morphism with trivial transitions and zero connection between
    /// two flat trivially-twisted gerbes.
    fn rank1_trivial(l: &LocalGerbe) -> GerbeMorphism {
        GerbeMorphism::identity(l)
    }

    /// A rank-2 morphism 𝓛 → 𝓛 over the three-patch cover with honest
    /// unitary transitions and zero connection.
    fn rank2_morphism(l: &LocalGerbe) -> GerbeMorphism {
        let theta = 0.3_f64;
        let u = CMat::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => c64(theta.cos(), 0.0),
            (0, 1) => c64(-theta.sin(), 0.0),
            (1, 0) => c64(theta.sin(), 0.0),
            _ => c64(theta.cos(), 0.0),
        });
        let v = CMat::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => c64(0.0, 1.0),
            (1, 1) => c64(1.0, 0.0),
            _ => c64(0.0, 0.0),
        });
        let mut alpha = BTreeMap::new();
        alpha.insert(vec![0, 1], u.clone());
        alpha.insert(vec![1, 2], v.clone());
        alpha.insert(vec![0, 2], u.mul(&v));
        let a = (0..3).map(|p| (p, MatForm::zero(2, 2, 3, 1))).collect();
        make_morphism(l, l, alpha, a).unwrap()
    }

    #[test]
    fn identity_morphism_is_valid() {
        let l = i0();
        let id = GerbeMorphism::identity(&l);
        let rebuilt = make_morphism(&l, &l, id.alpha.clone(), id.a.clone()).unwrap();
        assert_eq!(rebuilt.rank(), 1);
    }

    #[test]
    fn rank1_section_of_trivial_gerbe() {
        // 𝓘_0 → 𝓘_ρ with any u(1) connection 1-form
        let src = i0();
        let tgt = TrivialGerbe::new(prequantum_rho()).unwrap().as_gerbe();
        let mut a = BTreeMap::new();
        a.insert(0, MatForm::scalar(1, &u1_form()));
        let m = make_morphism(&src, &tgt, BTreeMap::new(), a).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn twisted_cocycle_detects_phase() {
        let l = flat_gerbe(0, 1);
        let mut alpha = BTreeMap::new();
        let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        alpha.insert(vec![0, 1], CMat::identity(1));
        alpha.insert(vec![1, 2], CMat::identity(1));
        alpha.insert(vec![0, 2], scalar_mat(phase));
        let a = (0..3).map(|p| (p, MatForm::zero(1, 1, 3, 1))).collect();
        let err = make_morphism(&l, &l, alpha, a).unwrap_err();
        assert!(matches!(err, TwovectError::TwistedCocycleFail { .. }));
    }

    #[test]
    fn twisted_rank1_between_distinct_twists() {
        // g₂/g₁ = exp(2πi/3) is absorbed by the transition phases
        let l1 = flat_gerbe(0, 1);
        let l2 = flat_gerbe(1, 3);
        let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let mut alpha = BTreeMap::new();
        alpha.insert(vec![0, 1], CMat::identity(1));
        alpha.insert(vec![1, 2], CMat::identity(1));
        alpha.insert(vec![0, 2], scalar_mat(phase));
        let a: BTreeMap<usize, MatForm> = (0..3)
            .map(|p| (p, MatForm::scalar(1, &u1_form())))
            .collect();
        let m = make_morphism(&l1, &l2, alpha.clone(), a).unwrap();
        assert_eq!(m.rank(), 1);
        // mismatched per-patch connections break compatibility
        let mut bad = BTreeMap::new();
        bad.insert(0, MatForm::scalar(1, &u1_form()));
        bad.insert(1, MatForm::zero(1, 1, 3, 1));
        bad.insert(2, MatForm::zero(1, 1, 3, 1));
        let err = make_morphism(&l1, &l2, alpha, bad).unwrap_err();
        assert!(matches!(err, TwovectError::ConnectionFail { .. }));
    }

    #[test]
    fn unitarity_is_enforced() {
        let l = flat_gerbe(0, 1);
        let mut alpha = BTreeMap::new();
        alpha.insert(vec![0, 1], scalar_mat(c64(2.0, 0.0)));
        alpha.insert(vec![1, 2], CMat::identity(1));
        alpha.insert(vec![0, 2], scalar_mat(c64(2.0, 0.0)));
        let a = (0..3).map(|p| (p, MatForm::zero(1, 1, 3, 1))).collect();
        let err = make_morphism(&l, &l, alpha, a).unwrap_err();
        assert!(matches!(err, TwovectError::UnitarityFail { .. }));
    }

    #[test]
    fn compose_multiplies_ranks_and_respects_identity() {
        let l = flat_gerbe(0, 1);
        let f = rank2_morphism(&l);
        let e = rank1_trivial(&l);
        let fe = compose(&f, &e).unwrap();
        assert_eq!(fe.rank(), 2);
        // compose(id, E) has the same transitions entrywise
        let id = rank1_trivial(&l);
        let ide = compose(&id, &f).unwrap();
        for (pair, m) in ide.transitions() {
            assert!(m.sub(f.transition(pair)).frobenius_norm() < 1e-14);
        }
        let ff = compose(&f, &f).unwrap();
        assert_eq!(ff.rank(), 4);
    }

    #[test]
    fn direct_sum_adds_ranks() {
        let l = flat_gerbe(0, 1);
        let e = rank1_trivial(&l);
        let f = rank2_morphism(&l);
        let s = direct_sum(&e, &f).unwrap();
        assert_eq!(s.rank(), 3);
    }

    #[test]
    fn distributor_is_a_permutation_two_isomorphism() {
        // F ⊗ (E ⊕ E′) ≅ (F ⊗ E) ⊕ (F ⊗ E′) via a permutation matrix
        let l = flat_gerbe(0, 1);
        let f = rank2_morphism(&l);
        let e = rank1_trivial(&l);
        let e2 = rank1_trivial(&l);
        let lhs = compose(&f, &direct_sum(&e, &e2).unwrap()).unwrap();
        let rhs = direct_sum(&compose(&f, &e).unwrap(), &compose(&f, &e2).unwrap()).unwrap();
        let (p, m, m2) = (f.rank(), e.rank(), e2.rank());
        let perm = CMat::from_fn(p * (m + m2), p * (m + m2), |row, col| {
            // column index (i, j) in F ⊗ (E ⊕ E′); row in the split order
            let (i, j) = (col / (m + m2), col % (m + m2));
            let target = if j < m { i * m + j } else { p * m + i * m2 + (j - m) };
            if row == target {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let phi = (0..3).map(|patch| (patch, perm.clone())).collect();
        let iso = verify_2morphism(&lhs, &rhs, phi).unwrap();
        assert_eq!(iso.source().rank(), iso.target().rank());
    }

    #[test]
    fn tensor_mor_between_tensor_gerbes() {
        let l = flat_gerbe(0, 1);
        let e = rank2_morphism(&l);
        let one = rank1_trivial(&l);
        let t = tensor_mor(&e, &one).unwrap();
        assert_eq!(t.rank(), 2);
        for (pair, m) in t.transitions() {
            assert!(m.sub(e.transition(pair)).frobenius_norm() < 1e-14);
        }
        let big = tensor_mor(&e, &e).unwrap();
        assert_eq!(big.rank(), 4);
    }

    #[test]
    fn riesz_is_involutive_and_matches_inverse_transpose() {
        let l = flat_gerbe(0, 1);
        let e = rank2_morphism(&l);
        let theta = riesz_theta(&e).unwrap();
        let back = riesz_theta(&theta).unwrap();
        for (pair, m) in back.transitions() {
            assert!(m.sub(e.transition(pair)).frobenius_norm() < 1e-14);
        }
        // α^{-t} = conj(α) for unitary α: check numerically via α·conj(α)ᵗ = 𝟙
        for (_, m) in e.transitions() {
            let prod = m.mul(&m.conj().transpose());
            assert!(prod.sub(&CMat::identity(2)).frobenius_norm() < 1e-12);
        }
        // contravariance on 2-morphisms: Θ(ψ∘φ) = Θ(φ)∘Θ(ψ)
        let phi = TwoMorphism::identity(&e);
        let lam = e
            .a
            .keys()
            .map(|&p| (p, CMat::identity(2).scale(c64(0.0, 1.0))))
            .collect();
        let psi = verify_2morphism(&e, &e, lam).unwrap();
        let lhs = riesz_theta_2mor(&psi.vertical(&phi).unwrap()).unwrap();
        let rhs = riesz_theta_2mor(&phi)
            .unwrap()
            .vertical(&riesz_theta_2mor(&psi).unwrap())
            .unwrap();
        for (&p, m) in lhs.components() {
            assert!(m.sub(rhs.component(p)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn two_morphism_examples() {
        let l = flat_gerbe(0, 1);
        let e = rank2_morphism(&l);
        // identity and scalar multiples
        let id = TwoMorphism::identity(&e);
        assert_eq!(id.source().rank(), 2);
        let lam = e
            .a
            .keys()
            .map(|&p| (p, CMat::identity(2).scale(c64(0.5, -0.25))))
            .collect();
        verify_2morphism(&e, &e, lam).unwrap();
        // inclusion into a direct sum
        let one = rank1_trivial(&l);
        let sum = direct_sum(&one, &one).unwrap();
        let incl = one
            .a
            .keys()
            .map(|&p| {
                (
                    p,
                    CMat::from_fn(2, 1, |r, _| if r == 0 { c64(1.0, 0.0) } else { c64(0.0, 0.0) }),
                )
            })
            .collect();
        verify_2morphism(&one, &sum, incl).unwrap();
        // a non-intertwining matrix is rejected
        let swap = e
            .a
            .keys()
            .map(|&p| {
                (
                    p,
                    CMat::from_fn(2, 2, |r, c| if r + c == 1 { c64(1.0, 0.0) } else { c64(0.0, 0.0) }),
                )
            })
            .collect();
        let err = verify_2morphism(&e, &e, swap).unwrap_err();
        assert!(matches!(err, TwovectError::IntertwineFail { .. }));
    }

    #[test]
    fn kernel_examples() {
        let l = flat_gerbe(0, 1);
        let one = rank1_trivial(&l);
        let two = direct_sum(&one, &one).unwrap();
        // φ = 0 keeps everything
        let zero = two
            .a
            .keys()
            .map(|&p| (p, CMat::zero(2, 2)))
            .collect();
        let phi0 = verify_2morphism(&two, &two, zero).unwrap();
        assert_eq!(kernel_2mor(&phi0).unwrap().rank(), 2);
        // invertible φ has trivial kernel
        let inv = two
            .a
            .keys()
            .map(|&p| (p, CMat::identity(2).scale(c64(0.0, 2.0))))
            .collect();
        let phi1 = verify_2morphism(&two, &two, inv).unwrap();
        assert_eq!(kernel_2mor(&phi1).unwrap().rank(), 0);
        // diag(0, 1) keeps the first block
        let proj = two
            .a
            .keys()
            .map(|&p| (p, CMat::diagonal(&[c64(0.0, 0.0), c64(1.0, 0.0)])))
            .collect();
        let phi2 = verify_2morphism(&two, &two, proj).unwrap();
        let ker = kernel_2mor(&phi2).unwrap();
        assert_eq!(ker.rank(), 1);
        for (pair, m) in ker.transitions() {
            assert!(m.sub(one.transition(pair)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn eigensplit_examples() {
        let l = flat_gerbe(0, 1);
        let one = rank1_trivial(&l);
        let two = direct_sum(&one, &one).unwrap();
        // λ𝟙 gives a single summand
        let lam = two
            .a
            .keys()
            .map(|&p| (p, CMat::identity(2).scale(c64(0.5, 1.5))))
            .collect();
        let phi = verify_2morphism(&two, &two, lam).unwrap();
        let split = eigensplit(&phi).unwrap();
        assert_eq!(split.parts.len(), 1);
        assert!((split.parts[0].eigenvalue - c64(0.5, 1.5)).norm() < 1e-9);
        // diag(1, 2) splits into two rank-1 summands sorted by (re, im)
        let d = two
            .a
            .keys()
            .map(|&p| (p, CMat::diagonal(&[c64(2.0, 0.0), c64(1.0, 0.0)])))
            .collect();
        let phi2 = verify_2morphism(&two, &two, d).unwrap();
        let split2 = eigensplit(&phi2).unwrap();
        assert_eq!(split2.parts.len(), 2);
        assert!((split2.parts[0].eigenvalue - c64(1.0, 0.0)).norm() < 1e-9);
        assert!((split2.parts[1].eigenvalue - c64(2.0, 0.0)).norm() < 1e-9);
        assert!(split2.parts.iter().all(|p| p.morphism.rank() == 1));
        // reassembly: U*(⊕blocks)U returns the original transitions
        let u0 = split2.reassembly.component(0);
        assert!(u0.mul(&u0.adjoint()).sub(&CMat::identity(2)).frobenius_norm() < 10.0 * TAU_U);
        // a non-normal endomorphism is rejected
        let jordan = two
            .a
            .keys()
            .map(|&p| {
                (
                    p,
                    CMat::from_fn(2, 2, |r, c| if (r, c) == (0, 1) { c64(1.0, 0.0) } else { c64(0.0, 0.0) }),
                )
            })
            .collect();
        let bad = TwoMorphism {
            src: two.clone(),
            tgt: two.clone(),
            phi: jordan,
        };
        assert!(matches!(eigensplit(&bad), Err(TwovectError::NotNormal { .. })));
    }

    #[test]
    fn determinant_morphism_is_valid_rank_one() {
        let l = flat_gerbe(0, 1);
        let e = rank2_morphism(&l);
        let det = det_morphism(&e).unwrap();
        assert_eq!(det.rank(), 1);
        for (pair, m) in det.transitions() {
            let expect = e.transition(pair).determinant();
            assert!((m.get(0, 0) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn interchange_of_direct_sum_and_vertical_composition() {
        let l = flat_gerbe(0, 1);
        let one = rank1_trivial(&l);
        let scalar2 = |z: Complex64, e: &GerbeMorphism| {
            let phi = e.a.keys().map(|&p| (p, CMat::identity(e.rank).scale(z))).collect();
            verify_2morphism(e, e, phi).unwrap()
        };
        let phi = scalar2(c64(2.0, 0.0), &one);
        let psi = scalar2(c64(0.0, 1.0), &one);
        let phi2 = scalar2(c64(-1.0, 0.0), &one);
        let psi2 = scalar2(c64(3.0, 0.0), &one);
        let lhs = phi
            .direct_sum(&psi)
            .unwrap()
            .vertical(&phi2.direct_sum(&psi2).unwrap())
            .unwrap();
        let rhs = phi
            .vertical(&phi2)
            .unwrap()
            .direct_sum(&psi.vertical(&psi2).unwrap())
            .unwrap();
        for (&p, m) in lhs.components() {
            assert!(m.sub(rhs.component(p)).frobenius_norm() < TAU_U);
        }
    }
}
