//! Exact-arithmetic verification of quantum Kahler geometry.
//!
//! This crate builds the exterior algebra, Hodge theory and metric of the
//! quantum projective spaces CP^n (and the quantum 2-sphere as the n = 1
//! base case), then certifies the structural claims that make the theory
//! work: dimension counts, Lefschetz isomorphisms, positivity of the
//! quantum Fubini-Study metric on an explicit interval of deformation
//! parameters, and spectral gaps of twisted Dolbeault Laplacians.  Every
//! certificate is produced in exact rational arithmetic over the field of
//! rational functions in the deformation parameter q; floating point only
//! appears in an optional cross-check mode for large spectral truncations.

pub mod fiberalg;
pub mod hodge;
pub mod linalg;
pub mod metric;
pub mod podles;
pub mod positivity;
pub mod scalar;
pub mod sturm;
pub mod twist;
pub mod uqrep;
