//! Discrete conformal geometry on planar triangle meshes.
//!
//! The crate works on an abstract oriented triangle mesh ([`TriMesh`]) together
//! with a planar [`Realization`] `z: V -> C`, and provides
//!
//! * cross ratios, circumcircle intersection angles and the finite conformal
//!   equivalence and pattern tests ([`realization`]),
//! * the cotangent Laplacian, Dirichlet solves and conjugate harmonic
//!   functions ([`laplace`]),
//! * infinitesimal conformal and pattern deformations ([`deform`]),
//! * discrete holomorphic quadratic differentials ([`hqd`]),
//! * the `sl(2, C)` picture of deformations ([`moebius`]),
//! * the discrete Weierstrass representation of minimal surfaces ([`weierstrass`]).
//!
//! Everything is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod deform;
pub mod error;
pub mod forms;
pub mod hqd;
pub mod laplace;
pub mod linalg;
pub mod mesh;
pub mod moebius;
pub mod realization;
pub mod shapes;
pub mod vector;
pub mod weierstrass;

pub use error::{Error, Result};
pub use forms::Gauge;
pub use mesh::TriMesh;
pub use num_complex::Complex64;
pub use realization::Realization;
