//! Explicit bounds for Green functions of cofinite Fuchsian groups.
//!
//! The pipeline runs from hyperbolic lattice-point counting ([`lattice`])
//! through special-function bounds ([`specfun`]) and Selberg–Harish-Chandra
//! transforms ([`transforms`]) to the bound constants `A`, `B` of the
//! Green-function certificate ([`bounds`]), with an extension to cusp
//! neighbourhoods ([`cusps`]) and a parameter search ([`optimize`]).
//!
//! All arithmetic is IEEE double precision. The bounds are "certified-style":
//! every step is an explicit inequality, but floating-point rounding is not
//! tracked with interval arithmetic.

pub mod bounds;
pub mod constants;
pub mod cusps;
pub mod error;
pub mod geom;
pub mod lattice;
pub mod optimize;
pub mod quad;
pub mod selftest;
pub mod specfun;
pub mod transforms;

pub use error::{GreenError, Result};

/// Complex numbers used for spectral parameters and special-function values.
pub type ComplexValue = num_complex::Complex64;
