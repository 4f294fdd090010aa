//! Computable core of higher geometric prequantization: exact Čech–Deligne
//! cochain algebra, local bundle gerbes with connective structure, their
//! morphism 2-category in the common-cover regime, multisymplectic observable
//! algebras, and numerical transgression/holonomy on discretized loop space.

pub mod cech_deligne;
pub mod cli;
pub mod exterior;
pub mod gerbe;
pub mod loopspace;
pub mod plectic;
pub mod rng;
pub mod sampling;
pub mod suite;
pub mod twovect;
