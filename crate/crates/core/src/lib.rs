//! Computational tooling for compact G2 constructions: exterior algebra on
//! R^7, Joyce orbifolds of T^7, Eguchi–Hanson metrics, the K3 lattice and
//! Donaldson matching, twisted-connected-sum bookkeeping, and a spectral
//! solver for the torsion-free equation on flat T^7.

pub mod eguchi_hanson;
pub mod forms;
pub mod k3;
pub mod linalg;
pub mod orbifold;
pub mod scalar;
pub mod tcs;
pub mod torsion;
mod util;

pub use scalar::{Domain, Rational, Scalar};
