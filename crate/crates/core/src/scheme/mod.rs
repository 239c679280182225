//! The implicit-explicit time stepper.
//!
//! Each step evolves the pressure-linearised scheme in two direct solves:
//! first the density from the mass-update operator, then the momentum from
//! the Helmholtz operator, both diagonalised by the discrete Fourier basis.

mod lambda;
mod params;
mod stepper;

pub use lambda::{
    bounds_lambda, compute_dt, compute_lambda, face_requirements, max_face_requirement, secant_d2, FaceRequirement,
};
pub use params::{pressure, pressure_potential, FluidParams, LambdaMode, SchemeParams, State};
pub use stepper::{
    linearized_residuals, run, run_with, step, Observer, RunSummary, SchemeResiduals, StepInfo, Stepper,
};
