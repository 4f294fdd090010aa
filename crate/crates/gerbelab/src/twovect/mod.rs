//! The 2-category of morphisms between local gerbes over a common cover, and
//! the trivial-gerbe 2-Hilbert space model: twisted unitary bundles with
//! connection, direct sums/tensors/composition, Riesz duals, kernels and
//! eigensplittings of 2-morphisms, parallel homs and the trace inner product.

pub mod cmat;
pub mod matform;
pub mod model;
pub mod morphism;

pub use cmat::CMat;
pub use matform::{MatForm, MatPoly};
pub use model::{gerbe_metric, hom_residual, hom_space, inner_product_hilbert, ModelHom, ModelSection};
pub use morphism::{
    compose, det_morphism, direct_sum, eigensplit, kernel_2mor, make_morphism, riesz_theta,
    riesz_theta_2mor, tensor_mor, verify_2morphism, EigenPart, EigenSplit, GerbeMorphism,
    TwoMorphism, TAU_EIG, TAU_U,
};

use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum TwovectError {
    #[error("twisted cocycle fails on {simplex:?} (residual {residual:.3e})")]
    TwistedCocycleFail { simplex: Vec<usize>, residual: f64 },
    #[error("transition on {pair:?} is not unitary (residual {residual:.3e})")]
    UnitarityFail { pair: Vec<usize>, residual: f64 },
    #[error("connection compatibility fails on {pair:?} (residual {residual:.3e})")]
    ConnectionFail { pair: Vec<usize>, residual: f64 },
    #[error("gerbe mismatch: {detail}")]
    GerbeMismatch { detail: String },
    #[error("intertwining fails on {pair:?} (residual {residual:.3e})")]
    IntertwineFail { pair: Vec<usize>, residual: f64 },
    #[error("2-morphism is not parallel on patch {patch} (residual {residual:.3e})")]
    ParallelFail { patch: usize, residual: f64 },
    #[error("kernel rank is not constant: {detail}")]
    NonConstantRank { detail: String },
    #[error("endomorphism is not normal (residual {residual:.3e})")]
    NotNormal { residual: f64 },
    #[error("inner product is not point-independent: {detail}")]
    XDependence { detail: String },
    #[error("invalid morphism data: {detail}")]
    InvalidData { detail: String },
}
