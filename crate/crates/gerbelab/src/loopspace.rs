//! Discretized loop-space geometry: transgression of forms, line/surface and
//! D-brane holonomy, Wilson loops of transgressed sections, the loop-space
//! connection, and the Kostant–Souriau operator.

use crate::cech_deligne::cech::U1Function;
use crate::exterior::{PolyForm, VectorField};
use crate::plectic::{PlecticError, PlecticSpace};
use crate::twovect::{CMat, MatForm};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default number of loop samples.
pub const DEFAULT_SAMPLES: usize = 256;
/// Default finite-difference step for loop deformations.
pub const DEFAULT_EPS: f64 = 1e-4;

#[derive(Debug, Error, Clone)]
pub enum LoopError {
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("surface is not closed: {detail}")]
    NotClosed { detail: String },
    #[error("patch data incomplete: {detail}")]
    PatchGap { detail: String },
    #[error("invalid data: {detail}")]
    InvalidData { detail: String },
    #[error("observable has no polynomial Hamiltonian vector field")]
    NotHamiltonian,
}

/// A loop sampled at N uniform parameter values τ_j = j/N (periodic).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledLoop {
    dim: usize,
    samples: Vec<Vec<f64>>,
}

impl SampledLoop {
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self, LoopError> {
        let n = samples.len();
        if n < 16 || n % 2 != 0 {
            return Err(LoopError::InvalidData {
                detail: "a loop needs at least 16 samples, evenly many".into(),
            });
        }
        let dim = samples[0].len();
        if samples.iter().any(|s| s.len() != dim) {
            return Err(LoopError::DimensionMismatch {
                detail: "loop samples have inconsistent dimension".into(),
            });
        }
        Ok(SampledLoop { dim, samples })
    }

    /// The unit circle in the (x¹,x²)-plane of ℝ³.
    pub fn circle(n: usize) -> Self {
        let samples = (0..n)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                vec![t.cos(), t.sin(), 0.0]
            })
            .collect();
        SampledLoop::new(samples).expect("circle sampling is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample(&self, j: usize) -> &[f64] {
        &self.samples[j.rem_euclid(self.samples.len())]
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// γ̇ at every sample by order-4 periodic central differences.
    pub fn velocity(&self) -> Vec<Vec<f64>> {
        let n = self.samples.len();
        let scale = n as f64 / 12.0;
        (0..n)
            .map(|j| {
                let m2 = self.sample(j + n - 2);
                let m1 = self.sample(j + n - 1);
                let p1 = self.sample(j + 1);
                let p2 = self.sample(j + 2);
                (0..self.dim)
                    .map(|k| scale * (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]))
                    .collect()
            })
            .collect()
    }

    /// The deformed loop γ + ε·X.
    pub fn deform(&self, x: &LoopTangent, eps: f64) -> Result<SampledLoop, LoopError> {
        if x.samples.len() != self.samples.len() {
            return Err(LoopError::DimensionMismatch {
                detail: "tangent sample count differs from the loop".into(),
            });
        }
        let samples = self
            .samples
            .iter()
            .zip(&x.samples)
            .map(|(s, v)| s.iter().zip(v).map(|(a, b)| a + eps * b).collect())
            .collect();
        SampledLoop::new(samples)
    }
}

/// A tangent vector to loop space at a sampled loop: one vector per sample.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopTangent {
    samples: Vec<Vec<f64>>,
}

impl LoopTangent {
    pub fn new(samples: Vec<Vec<f64>>) -> Self {
        LoopTangent { samples }
    }

    /// The pullback 𝔾*X of a global vector field: X evaluated along the loop.
    pub fn from_field(x: &VectorField, gamma: &SampledLoop) -> Self {
        let samples = gamma
            .samples
            .iter()
            .map(|s| {
                x.eval_f64(s)
                    .into_iter()
                    .map(|z| {
                        debug_assert!(z.im.abs() < 1e-9, "deformation field must be real");
                        z.re
                    })
                    .collect()
            })
            .collect();
        LoopTangent { samples }
    }

    pub fn constant(v: Vec<f64>, n: usize) -> Self {
        LoopTangent {
            samples: vec![v; n],
        }
    }

    pub fn sample(&self, j: usize) -> &[f64] {
        &self.samples[j.rem_euclid(self.samples.len())]
    }
}

/// Transgression of a p-form to loop space, evaluated on p−1 tangents:
/// 𝒯(ω)|_γ(X₁,…,X_{p−1}) = ∫₀¹ ω(X₁(τ),…,X_{p−1}(τ), γ̇(τ)) dτ
/// by the trapezoid rule on the periodic grid.
pub fn transgress_form(
    omega: &PolyForm,
    gamma: &SampledLoop,
    xs: &[&LoopTangent],
) -> Result<Complex64, LoopError> {
    if omega.degree() == 0 || xs.len() + 1 != omega.degree() {
        return Err(LoopError::DimensionMismatch {
            detail: format!(
                "a degree-{} form transgresses against {} tangents",
                omega.degree(),
                omega.degree().saturating_sub(1)
            ),
        });
    }
    if omega.dim() != gamma.dim() {
        return Err(LoopError::DimensionMismatch {
            detail: "form and loop live in different dimensions".into(),
        });
    }
    let vel = gamma.velocity();
    let n = gamma.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let mut vectors: Vec<&[f64]> = xs.iter().map(|x| x.sample(j)).collect();
        vectors.push(&vel[j]);
        let v = omega
            .evaluate(gamma.sample(j), &vectors)
            .map_err(|e| LoopError::DimensionMismatch {
                detail: e.to_string(),
            })?;
        acc += v;
    }
    Ok(acc / n as f64)
}

/// Directional derivative of a loop functional along a tangent by central
/// differences (optionally Richardson-extrapolated to order 4).
pub fn deform_derivative<F: Fn(&SampledLoop) -> Complex64>(
    f: &F,
    gamma: &SampledLoop,
    x: &LoopTangent,
    eps: f64,
    richardson: bool,
) -> Result<Complex64, LoopError> {
    let central = |h: f64| -> Result<Complex64, LoopError> {
        let plus = gamma.deform(x, h)?;
        let minus = gamma.deform(x, -h)?;
        Ok((f(&plus) - f(&minus)) / (2.0 * h))
    };
    let d1 = central(eps)?;
    if !richardson {
        return Ok(d1);
    }
    let d2 = central(eps / 2.0)?;
    Ok((d2 * 4.0 - d1) / 3.0)
}

/// Holonomy of a global abelian connection 1-form: exp(−∮ γ*A).
pub fn line_holonomy(a: &PolyForm, gamma: &SampledLoop) -> Result<Complex64, LoopError> {
    Ok((-transgress_form(a, gamma, &[])?).exp())
}

/// Gauss–Legendre 3-point nodes and weights on [0, 1].
const GL3: [(f64, f64); 3] = [
    (0.112701665379258, 0.277777777777778),
    (0.5, 0.444444444444444),
    (0.887298334724458, 0.277777777777778),
];

/// ∫ of a 1-form along the straight segment from p to q by 3-point
/// Gauss–Legendre quadrature.
fn segment_integral(a: &PolyForm, p: &[f64], q: &[f64]) -> Complex64 {
    let delta: Vec<f64> = p.iter().zip(q).map(|(u, v)| v - u).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for &(t, w) in &GL3 {
        let x: Vec<f64> = p.iter().zip(q).map(|(u, v)| u + t * (v - u)).collect();
        acc += a.evaluate(&x, &[&delta]).expect("segment evaluation") * w;
    }
    acc
}

/// Holonomy from per-patch connection forms with U(1) transitions: the loop is
/// split into arcs (arc j runs from sample j to j+1, `assignment[j]` names its
/// patch), each arc integrated in its own patch, with a transition factor
/// f_{p,q}(x) inserted at every switch point x from patch p to patch q.
pub fn line_holonomy_patches(
    patch_forms: &BTreeMap<usize, PolyForm>,
    transitions: &BTreeMap<Vec<usize>, U1Function>,
    assignment: &[usize],
    gamma: &SampledLoop,
) -> Result<Complex64, LoopError> {
    let n = gamma.len();
    if assignment.len() != n {
        return Err(LoopError::PatchGap {
            detail: "every arc of the loop needs a patch assignment".into(),
        });
    }
    let mut integral = Complex64::new(0.0, 0.0);
    let mut factor = Complex64::new(1.0, 0.0);
    for j in 0..n {
        let patch = assignment[j];
        let a = patch_forms.get(&patch).ok_or_else(|| LoopError::PatchGap {
            detail: format!("no connection form for patch {patch}"),
        })?;
        integral += segment_integral(a, gamma.sample(j), gamma.sample(j + 1));
        let next = assignment[(j + 1) % n];
        if next != patch {
            let x = gamma.sample(j + 1);
            let f = transition_value(transitions, patch, next, x)?;
            factor *= f;
        }
    }
    Ok((-integral).exp() * factor)
}

/// The value f_{p,q}(x), using the stored function for p < q and its inverse
/// for p > q.
fn transition_value(
    transitions: &BTreeMap<Vec<usize>, U1Function>,
    p: usize,
    q: usize,
    x: &[f64],
) -> Result<Complex64, LoopError> {
    let key = vec![p.min(q), p.max(q)];
    let f = transitions.get(&key).ok_or_else(|| LoopError::PatchGap {
        detail: format!("no transition for overlap {key:?}"),
    })?;
    let v = f.eval_f64(x);
    Ok(if p < q { v } else { v.inv() })
}

/// An oriented triangulated surface in ℝⁿ, optionally with a patch assignment
/// for local-data holonomy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TriangulatedSurface {
    pub vertices: Vec<Vec<f64>>,
    pub triangles: Vec<[usize; 3]>,
    /// Patch label per triangle (local holonomy mode).
    pub face_patch: Option<Vec<usize>>,
}

impl TriangulatedSurface {
    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    /// Every undirected edge with the list of (triangle, oriented-as-stored)
    /// incidences.
    fn edge_incidence(&self) -> BTreeMap<(usize, usize), Vec<(usize, bool)>> {
        let mut map: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                let key = (u.min(v), u.max(v));
                map.entry(key).or_default().push((t, u < v));
            }
        }
        map
    }

    /// Check closedness: every edge is shared by exactly two triangles with
    /// opposite induced orientations.
    pub fn check_closed(&self) -> Result<(), LoopError> {
        for (edge, inc) in self.edge_incidence() {
            if inc.len() != 2 || inc[0].1 == inc[1].1 {
                return Err(LoopError::NotClosed {
                    detail: format!("edge {edge:?} is not shared coherently by two triangles"),
                });
            }
        }
        Ok(())
    }

    /// The boundary as an ordered vertex loop (for disc-shaped surfaces).
    pub fn boundary_loop(&self) -> Result<Vec<usize>, LoopError> {
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for (edge, inc) in self.edge_incidence() {
            if inc.len() == 1 {
                // store with the stored (induced boundary) orientation
                let (u, v) = if inc[0].1 {
                    (edge.0, edge.1)
                } else {
                    (edge.1, edge.0)
                };
                next.insert(u, v);
            } else if inc.len() != 2 {
                return Err(LoopError::NotClosed {
                    detail: format!("edge {edge:?} appears {} times", inc.len()),
                });
            }
        }
        let &start = next.keys().next().ok_or_else(|| LoopError::NotClosed {
            detail: "surface has no boundary".into(),
        })?;
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let &nxt = next.get(&cur).ok_or_else(|| LoopError::NotClosed {
                detail: "boundary is not a single closed loop".into(),
            })?;
            if nxt == start {
                break;
            }
            path.push(nxt);
            cur = nxt;
            if path.len() > next.len() {
                return Err(LoopError::NotClosed {
                    detail: "boundary does not close up".into(),
                });
            }
        }
        Ok(path)
    }
}

/// ∫ of a 2-form over a flat triangle by the 3-point edge-midpoint rule
/// (exact for quadratic integrands over the triangle).
fn triangle_integral(rho: &PolyForm, v0: &[f64], v1: &[f64], v2: &[f64]) -> Complex64 {
    let e1: Vec<f64> = v0.iter().zip(v1).map(|(a, b)| b - a).collect();
    let e2: Vec<f64> = v0.iter().zip(v2).map(|(a, b)| b - a).collect();
    let mids = [
        midpoint(v0, v1),
        midpoint(v1, v2),
        midpoint(v2, v0),
    ];
    let mut acc = Complex64::new(0.0, 0.0);
    for m in &mids {
        acc += rho.evaluate(m, &[&e1, &e2]).expect("triangle evaluation");
    }
    acc / 6.0
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

/// ∫_Σ ρ of a 2-form over a closed triangulated surface, one exact
/// flat-triangle quadrature per face. Converges at second order in the mesh
/// width for curved surfaces; extrapolate over refinement levels when higher
/// accuracy is needed.
pub fn surface_integral(
    rho: &PolyForm,
    sigma: &TriangulatedSurface,
) -> Result<Complex64, LoopError> {
    sigma.check_closed()?;
    if rho.degree() != 2 || rho.dim() != sigma.dim() {
        return Err(LoopError::DimensionMismatch {
            detail: "surface integration needs a 2-form of the ambient dimension".into(),
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for tri in &sigma.triangles {
        total += triangle_integral(
            rho,
            &sigma.vertices[tri[0]],
            &sigma.vertices[tri[1]],
            &sigma.vertices[tri[2]],
        );
    }
    Ok(total)
}

/// Surface holonomy of the trivial gerbe 𝓘_ρ: exp(−∫_Σ ρ).
pub fn surface_holonomy_trivialized(
    rho: &PolyForm,
    sigma: &TriangulatedSurface,
) -> Result<Complex64, LoopError> {
    Ok((-surface_integral(rho, sigma)?).exp())
}

/// Surface holonomy with one step of Richardson extrapolation over a
/// mesh-refinement pair (coarse, fine), where the fine mesh halves the mesh
/// width; cancels the second-order geometric discretization error.
pub fn surface_holonomy_extrapolated(
    rho: &PolyForm,
    coarse: &TriangulatedSurface,
    fine: &TriangulatedSurface,
) -> Result<Complex64, LoopError> {
    let ic = surface_integral(rho, coarse)?;
    let i_f = surface_integral(rho, fine)?;
    Ok((-(i_f * 4.0 - ic) / 3.0).exp())
}

/// Local patch data for surface holonomy: curvings per patch, connections per
/// overlap (exactly the data of a `LocalGerbe`, restricted to what the surface
/// touches).
pub struct LocalSurfaceData<'a> {
    pub curvings: BTreeMap<usize, &'a PolyForm>,
    pub connections: BTreeMap<Vec<usize>, &'a PolyForm>,
}

impl<'a> LocalSurfaceData<'a> {
    pub fn from_gerbe(gerbe: &'a crate::gerbe::LocalGerbe) -> Self {
        let cover = gerbe.cover();
        let curvings = cover
            .simplices(0)
            .into_iter()
            .map(|p| (p[0], gerbe.curving(p[0])))
            .collect();
        let connections = cover
            .simplices(1)
            .into_iter()
            .map(|p| {
                let form = gerbe.connection(&p);
                (p, form)
            })
            .collect();
        LocalSurfaceData {
            curvings,
            connections,
        }
    }
}

/// Surface holonomy from local data: the product of face factors exp(−∫_t B),
/// with an edge factor exp(−∫_{e|t} A_{a_{t'},a_t}) for every interior edge
/// (e oriented as it appears in t, where t and t' are its two triangles).
pub fn surface_holonomy_local(
    data: &LocalSurfaceData,
    sigma: &TriangulatedSurface,
) -> Result<Complex64, LoopError> {
    sigma.check_closed()?;
    let patches = sigma
        .face_patch
        .as_ref()
        .ok_or_else(|| LoopError::PatchGap {
            detail: "local holonomy needs a face patch assignment".into(),
        })?;
    if patches.len() != sigma.triangles.len() {
        return Err(LoopError::PatchGap {
            detail: "one patch label per triangle required".into(),
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (t, tri) in sigma.triangles.iter().enumerate() {
        let b = data
            .curvings
            .get(&patches[t])
            .ok_or_else(|| LoopError::PatchGap {
                detail: format!("no curving for patch {}", patches[t]),
            })?;
        total += triangle_integral(
            b,
            &sigma.vertices[tri[0]],
            &sigma.vertices[tri[1]],
            &sigma.vertices[tri[2]],
        );
    }
    for (edge, inc) in sigma.edge_incidence() {
        let (t, t2) = (inc[0].0, inc[1].0);
        let (pa, pb) = (patches[t], patches[t2]);
        if pa == pb {
            continue;
        }
        // A_{a_{t'}, a_t} along the edge as oriented in t
        let (u, v) = if inc[0].1 {
            (edge.0, edge.1)
        } else {
            (edge.1, edge.0)
        };
        total += connection_integral(data, pb, pa, &sigma.vertices[u], &sigma.vertices[v])?;
    }
    Ok((-total).exp())
}

/// ∫ A_{p,q} along a segment, using antisymmetry A_{q,p} = −A_{p,q} when the
/// stored order is flipped.
fn connection_integral(
    data: &LocalSurfaceData,
    p: usize,
    q: usize,
    from: &[f64],
    to: &[f64],
) -> Result<Complex64, LoopError> {
    let key = vec![p.min(q), p.max(q)];
    let a = data
        .connections
        .get(&key)
        .ok_or_else(|| LoopError::PatchGap {
            detail: format!("no connection for overlap {key:?}"),
        })?;
    let v = segment_integral(a, from, to);
    Ok(if p < q { v } else { -v })
}

/// tr(hol_E(∂D))·exp(−∫_D ρ): D-brane holonomy of a disc with boundary data
/// given by the global connection `a` of a trivial-gerbe section.
pub fn dbrane_holonomy(
    rho: &PolyForm,
    a: &MatForm,
    disc: &TriangulatedSurface,
) -> Result<Complex64, LoopError> {
    let boundary = disc.boundary_loop()?;
    let mut disc_integral = Complex64::new(0.0, 0.0);
    for tri in &disc.triangles {
        disc_integral += triangle_integral(
            rho,
            &disc.vertices[tri[0]],
            &disc.vertices[tri[1]],
            &disc.vertices[tri[2]],
        );
    }
    let pts: Vec<&[f64]> = boundary.iter().map(|&v| disc.vertices[v].as_slice()).collect();
    let hol = wilson_matrix(a, &pts)?;
    Ok(hol.trace() * (-disc_integral).exp())
}

/// Path-ordered product of exp(−a(mid)·Δ) around a closed polygonal path.
fn wilson_matrix(a: &MatForm, pts: &[&[f64]]) -> Result<CMat, LoopError> {
    let n = a.rows();
    let mut u = CMat::identity(n);
    let count = pts.len();
    for j in 0..count {
        let p = pts[j];
        let q = pts[(j + 1) % count];
        let mid = midpoint(p, q);
        let delta: Vec<f64> = p.iter().zip(q).map(|(x, y)| y - x).collect();
        let step = CMat::from_fn(n, n, |r, c| {
            a.at(r, c)
                .evaluate(&mid, &[&delta])
                .expect("connection evaluation")
        });
        u = step.scale(Complex64::new(-1.0, 0.0)).expm().mul(&u);
    }
    Ok(u)
}

/// Trace of the Wilson loop of a transgressed section: the path-ordered
/// exponential of −γ*a over the loop, midpoint rule at step 1/N.
pub fn transgress_section_wilson(a: &MatForm, gamma: &SampledLoop) -> Result<Complex64, LoopError> {
    if a.dim() != gamma.dim() || a.degree() != 1 {
        return Err(LoopError::DimensionMismatch {
            detail: "Wilson loop needs a matrix 1-form of the loop's dimension".into(),
        });
    }
    let pts: Vec<&[f64]> = (0..gamma.len()).map(|j| gamma.sample(j)).collect();
    Ok(wilson_matrix(a, &pts)?.trace())
}

/// The transgressed connection of the trivialized regime: 𝒜|_γ(X) = 𝒯(ρ)(X).
pub fn transgressed_connection(
    rho: &PolyForm,
    gamma: &SampledLoop,
    x: &LoopTangent,
) -> Result<Complex64, LoopError> {
    transgress_form(rho, gamma, &[x])
}

/// A loop functional: exponentials of transgressed 1-forms, closed under
/// products, sums and constant multiples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum LoopFunctional {
    /// exp(c·𝒯(θ))
    Exp { c: (f64, f64), theta: PolyForm },
    Product(Vec<LoopFunctional>),
    Sum(Vec<LoopFunctional>),
    Constant((f64, f64)),
}

impl LoopFunctional {
    pub fn exp_transgression(theta: PolyForm) -> Self {
        LoopFunctional::Exp {
            c: (1.0, 0.0),
            theta,
        }
    }

    pub fn evaluate(&self, gamma: &SampledLoop) -> Result<Complex64, LoopError> {
        match self {
            LoopFunctional::Exp { c, theta } => {
                let t = transgress_form(theta, gamma, &[])?;
                Ok((Complex64::new(c.0, c.1) * t).exp())
            }
            LoopFunctional::Product(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in fs {
                    acc *= f.evaluate(gamma)?;
                }
                Ok(acc)
            }
            LoopFunctional::Sum(fs) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for f in fs {
                    acc += f.evaluate(gamma)?;
                }
                Ok(acc)
            }
            LoopFunctional::Constant(c) => Ok(Complex64::new(c.0, c.1)),
        }
    }
}

/// The Kostant–Souriau operator applied to a loop functional at a loop:
/// Q(α)Ψ = ∇_{X_α}Ψ + 2πi·𝒯(α)·Ψ with ∇ = deformation derivative + 𝒜(X_α).
pub fn ks_apply<F: Fn(&SampledLoop) -> Complex64>(
    space: &PlecticSpace,
    rho: &PolyForm,
    alpha: &PolyForm,
    psi: &F,
    gamma: &SampledLoop,
    eps: f64,
) -> Result<Complex64, LoopError> {
    let x = space.hamiltonian_vf(alpha).map_err(|e| match e {
        PlecticError::NotHamiltonian => LoopError::NotHamiltonian,
        other => LoopError::InvalidData {
            detail: other.to_string(),
        },
    })?;
    let tangent = LoopTangent::from_field(&x, gamma);
    let nabla = deform_derivative(psi, gamma, &tangent, eps, false)?;
    let connection = transgressed_connection(rho, gamma, &tangent)?;
    let phase = transgress_form(alpha, gamma, &[])?;
    let value = psi(gamma);
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    Ok(nabla + connection * value + two_pi_i * phase * value)
}

/// 𝒯(ω)|_γ evaluated on pullbacks of global fields.
pub fn loop_form_value(
    omega: &PolyForm,
    gamma: &SampledLoop,
    fields: &[&VectorField],
) -> Result<Complex64, LoopError> {
    let tangents: Vec<LoopTangent> = fields
        .iter()
        .map(|f| LoopTangent::from_field(f, gamma))
        .collect();
    let refs: Vec<&LoopTangent> = tangents.iter().collect();
    transgress_form(omega, gamma, &refs)
}

/// The coordinate-free exterior derivative of 𝒯(ω) on loop space against
/// pullback fields V_i:
/// dT(V₀,…,V_q) = Σ (−1)^i V_i·T(…V̂_i…) + Σ_{i<j} (−1)^{i+j} T([V_i,V_j],…).
pub fn loop_exterior_derivative(
    omega: &PolyForm,
    gamma: &SampledLoop,
    fields: &[&VectorField],
    eps: f64,
) -> Result<Complex64, LoopError> {
    let q = fields.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..q {
        let rest: Vec<&VectorField> = (0..q).filter(|&k| k != i).map(|k| fields[k]).collect();
        let functional =
            |g: &SampledLoop| loop_form_value(omega, g, &rest).expect("inner evaluation");
        let tangent = LoopTangent::from_field(fields[i], gamma);
        let term = deform_derivative(&functional, gamma, &tangent, eps, true)?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += term * sign;
    }
    for i in 0..q {
        for j in i + 1..q {
            let bracket = fields[i].bracket(fields[j]);
            let mut args: Vec<&VectorField> = vec![&bracket];
            for (k, f) in fields.iter().enumerate() {
                if k != i && k != j {
                    args.push(f);
                }
            }
            let term = loop_form_value(omega, gamma, &args)?;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            acc += term * sign;
        }
    }
    Ok(acc)
}

/// An open path sampled at N+1 points τ_j = j/N.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledPath {
    dim: usize,
    samples: Vec<Vec<f64>>,
}

impl SampledPath {
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self, LoopError> {
        if samples.len() < 17 {
            return Err(LoopError::InvalidData {
                detail: "a path needs at least 17 samples".into(),
            });
        }
        let dim = samples[0].len();
        Ok(SampledPath { dim, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample(&self, j: usize) -> &[f64] {
        &self.samples[j]
    }

    /// Order-4 derivative: central in the interior, one-sided at the ends.
    pub fn velocity(&self) -> Vec<Vec<f64>> {
        let n = self.samples.len();
        let steps = (n - 1) as f64;
        (0..n)
            .map(|j| {
                (0..self.dim)
                    .map(|k| {
                        let v = |i: usize| self.samples[i][k];
                        let d = if j >= 2 && j + 2 < n {
                            (-v(j + 2) + 8.0 * v(j + 1) - 8.0 * v(j - 1) + v(j - 2)) / 12.0
                        } else if j + 4 < n && j < 2 {
                            (-25.0 * v(j) + 48.0 * v(j + 1) - 36.0 * v(j + 2) + 16.0 * v(j + 3)
                                - 3.0 * v(j + 4))
                                / 12.0
                        } else {
                            (25.0 * v(j) - 48.0 * v(j - 1) + 36.0 * v(j - 2) - 16.0 * v(j - 3)
                                + 3.0 * v(j - 4))
                                / 12.0
                        };
                        d * steps
                    })
                    .collect()
            })
            .collect()
    }

    pub fn deform(&self, x: &[Vec<f64>], eps: f64) -> SampledPath {
        let samples = self
            .samples
            .iter()
            .zip(x)
            .map(|(s, v)| s.iter().zip(v).map(|(a, b)| a + eps * b).collect())
            .collect();
        SampledPath {
            dim: self.dim,
            samples,
        }
    }
}

/// Transgression over an open path: trapezoid rule with half-weighted ends.
pub fn transgress_form_path(
    omega: &PolyForm,
    path: &SampledPath,
    fields: &[&VectorField],
) -> Result<Complex64, LoopError> {
    if fields.len() + 1 != omega.degree() {
        return Err(LoopError::DimensionMismatch {
            detail: "tangent count must be the form degree minus one".into(),
        });
    }
    let vel = path.velocity();
    let n = path.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let point = path.sample(j);
        let values: Vec<Vec<f64>> = fields
            .iter()
            .map(|f| {
                f.eval_f64(point)
                    .into_iter()
                    .map(|z| z.re)
                    .collect()
            })
            .collect();
        let mut vectors: Vec<&[f64]> = values.iter().map(Vec::as_slice).collect();
        vectors.push(&vel[j]);
        let v = omega
            .evaluate(point, &vectors)
            .map_err(|e| LoopError::DimensionMismatch {
                detail: e.to_string(),
            })?;
        let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
        acc += v * w;
    }
    Ok(acc / (n - 1) as f64)
}

/// An icosphere: the unit icosahedron subdivided `subdivisions` times with all
/// vertices projected to the unit sphere, oriented outward.
pub fn icosphere(subdivisions: usize) -> TriangulatedSurface {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut vertices: Vec<Vec<f64>> = raw.iter().map(|v| normalize(v)).collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midcache: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for tri in &triangles {
            let mut mids = [0usize; 3];
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                let key = (u.min(v), u.max(v));
                mids[k] = *midcache.entry(key).or_insert_with(|| {
                    let m = normalize(&[
                        0.5 * (vertices[u][0] + vertices[v][0]),
                        0.5 * (vertices[u][1] + vertices[v][1]),
                        0.5 * (vertices[u][2] + vertices[v][2]),
                    ]);
                    vertices.push(m);
                    vertices.len() - 1
                });
            }
            next.push([tri[0], mids[0], mids[2]]);
            next.push([tri[1], mids[1], mids[0]]);
            next.push([tri[2], mids[2], mids[1]]);
            next.push([mids[0], mids[1], mids[2]]);
        }
        triangles = next;
    }
    TriangulatedSurface {
        vertices,
        triangles,
        face_patch: None,
    }
}

fn normalize(v: &[f64; 3]) -> Vec<f64> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    vec![v[0] / n, v[1] / n, v[2] / n]
}
