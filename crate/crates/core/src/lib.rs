//! Structure-preserving finite-volume solver for the barotropic Euler
//! equations at low Mach number.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: uniform periodic meshes in one or two dimensions
//! * [`operators`]: central-difference stencils and a dense-matrix oracle
//! * [`spectral`]: FFT-based solves of the implicit circulant operators
//! * [`scheme`]: pressure law, λ selection and the IMEX time stepper
//! * [`diagnostics`]: energies, discrete identities and convergence tables
//! * [`benchmarks`]: initial data and parameters of the standard test problems

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod operators;
pub mod scheme;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{FaceRef, Grid, Orientation};
pub use operators::{ScalarField, VectorField};
pub use scheme::{FluidParams, LambdaMode, SchemeParams, State};
