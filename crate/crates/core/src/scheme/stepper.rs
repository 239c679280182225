use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operators::{div_convective_flux, div_h, grad_h, lap_compact, lap_compact_vec, ScalarField, VectorField};
use crate::spectral::{ModeTable, SpectralSolver, Symbols};

use super::lambda::{compute_dt, compute_lambda};
use super::params::{FluidParams, SchemeParams, State};

/// What one step used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub lambda: f64,
}

/// Residuals of the linearised mass and momentum equations, each in the
/// max norm next to the size of the terms that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeResiduals {
    pub mass: f64,
    pub mass_scale: f64,
    pub momentum: f64,
    pub momentum_scale: f64,
}

impl SchemeResiduals {
    pub fn within(&self, rel: f64) -> bool {
        self.mass <= rel * self.mass_scale && self.momentum <= rel * self.momentum_scale
    }
}

/// Reusable stepping context: caches the mode table and transform plans.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    fluid: FluidParams,
    params: SchemeParams,
    modes: Arc<ModeTable>,
    solver: SpectralSolver,
}

impl Stepper {
    pub fn new(grid: &Grid, fluid: FluidParams, params: SchemeParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            grid: *grid,
            fluid,
            params,
            modes: Arc::new(ModeTable::new(grid)),
            solver: SpectralSolver::new(grid),
        })
    }

    /// Swaps in a different transform backend (used for fault injection).
    #[doc(hidden)]
    pub fn with_solver(mut self, solver: SpectralSolver) -> Self {
        self.solver = solver;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn fluid(&self) -> &FluidParams {
        &self.fluid
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn symbols(&self, dt: f64, lambda: f64) -> Symbols {
        Symbols::from_modes(Arc::clone(&self.modes), dt, lambda, &self.fluid)
    }

    /// Advances by one step with the time step and λ chosen from `state`.
    pub fn step(&self, state: &State) -> Result<(State, StepInfo)> {
        if state.rho.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let dt = compute_dt(state, &self.params, &self.grid);
        let lambda = compute_lambda(state, &self.params, &self.fluid);
        let next = self.step_with(state, dt, lambda)?;
        Ok((next, StepInfo { dt, lambda }))
    }

    /// Advances by one step with prescribed `dt` and `lambda`.
    pub fn step_with(&self, state: &State, dt: f64, lambda: f64) -> Result<State> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("diffusion must be non-negative, got {lambda}")));
        }
        let sym = self.symbols(dt, lambda);
        let u = state.velocity();
        let conv = div_convective_flux(&state.rho, &u);
        let explicit = state.m.add_scaled(-dt, &conv);

        let g = self.solver.solve_helmholtz_vec(&explicit, &sym)?;
        let rhs = state.rho.add_scaled(-dt, &div_h(&g));
        let rho = self.solver.solve_mass_operator(&rhs, &sym)?;

        let step = state.n + 1;
        for (cell, &value) in rho.values().iter().enumerate() {
            if !(value > 0.0) {
                return Err(Error::PositivityLost { cell, step, value });
            }
        }

        let pressure = grad_h(&rho);
        let coef = dt / (self.fluid.eps * self.fluid.eps) * self.fluid.dp_ref();
        let m = self.solver.solve_helmholtz_vec(&explicit.add_scaled(-coef, &pressure), &sym)?;

        let t = if dt == self.params.t_end - state.t { self.params.t_end } else { state.t + dt };
        let next = State { t, n: step, rho, m };
        debug_assert!({
            let r = linearized_residuals(state, &next, dt, lambda, &self.fluid);
            r.within(1e-9)
        });
        Ok(next)
    }
}

/// One step of the linearised scheme.
pub fn step(state: &State, params: &SchemeParams, fluid: &FluidParams, grid: &Grid) -> Result<State> {
    Stepper::new(grid, *fluid, *params)?.step(state).map(|(s, _)| s)
}

/// Residuals of the linearised update equations for the pair `(old, new)`.
pub fn linearized_residuals(old: &State, new: &State, dt: f64, lambda: f64, fluid: &FluidParams) -> SchemeResiduals {
    let g = *old.rho.grid();
    let hl = g.h() * lambda;
    let max = |f: &ScalarField| f.max_abs();

    let time = new.rho.add_scaled(-1.0, &old.rho).scale(1.0 / dt);
    let flux = div_h(&new.m);
    let diff = lap_compact(&new.rho).scale(hl);
    let mass = time.add_scaled(1.0, &flux).add_scaled(-1.0, &diff);
    let mass_scale = (max(&old.rho) + max(&new.rho)) / dt + max(&flux) + max(&diff);

    let u = old.velocity();
    let conv = div_convective_flux(&old.rho, &u);
    let mtime = new.m.add_scaled(-1.0, &old.m).map_components(|c| c.scale(1.0 / dt));
    let mdiff = lap_compact_vec(&new.m).map_components(|c| c.scale(hl));
    let press = grad_h(&new.rho).map_components(|c| c.scale(fluid.dp_ref() / (fluid.eps * fluid.eps)));
    let mom: VectorField = mtime.add_scaled(1.0, &conv).add_scaled(-1.0, &mdiff).add_scaled(1.0, &press);
    let momentum_scale = (old.m.max_abs() + new.m.max_abs()) / dt + conv.max_abs() + mdiff.max_abs() + press.max_abs();

    SchemeResiduals { mass: max(&mass), mass_scale, momentum: mom.max_abs(), momentum_scale }
}

/// Receives the initial state and every accepted step of a run.
pub trait Observer {
    fn start(&mut self, _state: &State) {}
    fn step(&mut self, _prev: &State, _next: &State, _info: &StepInfo) {}
}

/// Outcome of [`run`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: u64,
    pub final_state: State,
    pub min_rho: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Steps from `initial` until `params.t_end`, notifying every observer.
pub fn run(
    initial: State,
    params: &SchemeParams,
    fluid: &FluidParams,
    grid: &Grid,
    observers: &mut [&mut dyn Observer],
) -> Result<RunSummary> {
    let stepper = Stepper::new(grid, *fluid, *params)?;
    run_with(&stepper, initial, observers)
}

pub fn run_with(stepper: &Stepper, initial: State, observers: &mut [&mut dyn Observer]) -> Result<RunSummary> {
    let params = stepper.params();
    for o in observers.iter_mut() {
        o.start(&initial);
    }
    let mut min_rho = initial.rho.min();
    let (mut lambda_min, mut lambda_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut state = initial;
    let mut steps = 0u64;
    while state.t < params.t_end {
        if steps >= params.max_steps {
            return Err(Error::StepLimitExceeded { max_steps: params.max_steps, t: state.t, t_end: params.t_end });
        }
        let (next, info) = stepper.step(&state)?;
        for o in observers.iter_mut() {
            o.step(&state, &next, &info);
        }
        min_rho = min_rho.min(next.rho.min());
        lambda_min = lambda_min.min(info.lambda);
        lambda_max = lambda_max.max(info.lambda);
        state = next;
        steps += 1;
    }
    Ok(RunSummary { steps, final_state: state, min_rho, lambda_min, lambda_max })
}
