//! Energies, asymptotic indicators, exact discrete identities and
//! convergence tables.

mod eoc;
mod identities;

pub use eoc::{eoc_table, l2_error, l2_error_vec, restrict, EocRow};
pub use identities::{
    check_lambda_conditions, ke_balance_residual, renorm_residual, FaceMargin, IdentityResidual, KeBalance,
    LambdaReport,
};

use crate::error::{Error, Result};
use crate::operators::div_h;
use crate::scheme::{FluidParams, State, StepInfo};

/// Energy budget of one time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    /// Step that produced this level; 0 for the initial state.
    pub dt: f64,
    pub lambda: f64,
    pub ke: f64,
    pub pe: f64,
    pub total: f64,
    pub min_rho: f64,
    pub div_u_l1: f64,
}

impl EnergyRecord {
    pub fn with_step(mut self, info: &StepInfo) -> Self {
        self.dt = info.dt;
        self.lambda = info.lambda;
        self
    }
}

/// Kinetic energy `Σ|K| |m|²/2ρ`, potential energy `Σ|K| P(ρ)/ε²` and friends.
pub fn energies(state: &State, fluid: &FluidParams) -> Result<EnergyRecord> {
    let rho = &state.rho;
    if let Some(&bad) = rho.values().iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NonPositiveDensity(bad));
    }
    let g = rho.grid();
    let vol = g.cell_volume();
    let mut ke = 0.0;
    let mut pe = 0.0;
    for k in 0..g.cell_count() {
        let m = state.m.at(k);
        ke += 0.5 * (m[0] * m[0] + m[1] * m[1]) / rho[k];
        pe += fluid.potential(rho[k]);
    }
    ke *= vol;
    pe *= vol / (fluid.eps * fluid.eps);
    Ok(EnergyRecord {
        t: state.t,
        dt: 0.0,
        lambda: 0.0,
        ke,
        pe,
        total: ke + pe,
        min_rho: rho.min(),
        div_u_l1: div_h(&state.velocity()).l1_norm(),
    })
}

/// Distance of a state from the incompressible limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApIndicators {
    pub max_density_deviation: f64,
    pub div_u_l1: f64,
    pub div_u_l1_over_eps2: f64,
}

pub fn ap_indicators(state: &State, fluid: &FluidParams) -> ApIndicators {
    let dev = state.rho.values().iter().fold(0.0f64, |m, r| m.max((r - fluid.rho0).abs()));
    let div = div_h(&state.velocity()).l1_norm();
    ApIndicators { max_density_deviation: dev, div_u_l1: div, div_u_l1_over_eps2: div / (fluid.eps * fluid.eps) }
}
