//! Numerical laboratory for area-type two-cocycles on groups of
//! symplectomorphisms.
//!
//! The crate is organized in layers:
//!
//! - [`geom`]: points, forms, fields, curves, quadrature, and the
//!   finite-difference exterior calculus;
//! - [`poly`]: exact polynomial calculus used as an oracle for the
//!   finite-difference layer;
//! - [`element`]: concrete symplectomorphism realizations (translations,
//!   Moebius maps, twists, products, user closures);
//! - [`model`]: charts bundling a domain, a symplectic form, a primitive, and
//!   a basepoint;
//! - [`cohomology`]: the group side: quadrature cocycle, coboundaries,
//!   central extension, prequantization, coboundary fitting;
//! - [`lie`]: the algebra side: Chevalley-Eilenberg calculus, Hamiltonian
//!   fields, sl2 and torus specializations, group-to-algebra differentiation.

pub mod cohomology;
pub mod element;
pub mod error;
pub mod geom;
pub mod lab;
pub mod lie;
pub mod model;
pub mod poly;

pub use error::{Error, Result};
