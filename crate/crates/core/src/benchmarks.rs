//! Initial data and parameters of the standard test problems.
//!
//! All initial data are sampled at cell centres.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operators::{ScalarField, VectorField};
use crate::scheme::{FluidParams, LambdaMode, SchemeParams, State};

pub type Initializer = fn(&Grid, f64) -> Result<State>;

/// Everything needed to set up one benchmark.
#[derive(Debug, Clone, Copy)]
pub struct ProblemPreset {
    pub name: &'static str,
    pub dim: usize,
    pub origin: [f64; 2],
    pub length: [f64; 2],
    pub kappa: f64,
    pub gamma: f64,
    /// Mach numbers the problem is documented for; others are allowed.
    pub eps_list: &'static [f64],
    pub default_eps: f64,
    /// `(ε, C)` pairs; unlisted ε fall back to `default_cfl`.
    pub cfl_table: &'static [(f64, f64)],
    pub default_cfl: f64,
    pub lambda0: f64,
    /// `(ε, c)` pairs for the adaptive mode.
    pub c_table: &'static [(f64, f64)],
    pub default_c: f64,
    pub t_end: f64,
    pub default_n: usize,
    pub init: Initializer,
}

impl ProblemPreset {
    pub fn cfl_for(&self, eps: f64) -> f64 {
        lookup(self.cfl_table, eps).unwrap_or(self.default_cfl)
    }

    pub fn c_for(&self, eps: f64) -> f64 {
        lookup(self.c_table, eps).unwrap_or(self.default_c)
    }

    /// Grid with `n` cells per axis on the problem's domain.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        let ns = [n; 2];
        Grid::new(self.dim, &ns[..self.dim], &self.origin[..self.dim], &self.length[..self.dim])
    }

    pub fn initial_state(&self, grid: &Grid, eps: f64) -> Result<State> {
        (self.init)(grid, eps)
    }

    /// Fluid parameters with `ρ₀` taken as the mean of `initial` unless given.
    pub fn fluid(&self, eps: f64, initial: &State, rho0: Option<f64>) -> Result<FluidParams> {
        FluidParams::new(self.kappa, self.gamma, eps, rho0.unwrap_or_else(|| initial.rho.mean()))
    }

    /// Constant-λ parameters at the documented CFL number.
    pub fn scheme_params(&self, eps: f64) -> SchemeParams {
        let mut p = SchemeParams::constant(self.cfl_for(eps), self.lambda0, self.t_end);
        p.c = self.c_for(eps);
        p
    }

    pub fn setup(&self, n: usize, eps: f64) -> Result<Setup> {
        let grid = self.grid(n)?;
        let state = self.initial_state(&grid, eps)?;
        let fluid = self.fluid(eps, &state, None)?;
        Ok(Setup { grid, fluid, params: self.scheme_params(eps), state })
    }
}

/// A ready-to-run problem instance.
#[derive(Debug, Clone)]
pub struct Setup {
    pub grid: Grid,
    pub fluid: FluidParams,
    pub params: SchemeParams,
    pub state: State,
}

impl Setup {
    pub fn with_adaptive_lambda(mut self) -> Self {
        self.params.lambda_mode = LambdaMode::Adaptive;
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.params.t_end = t_end;
        self
    }
}

fn lookup(table: &[(f64, f64)], eps: f64) -> Option<f64> {
    table.iter().find(|(e, _)| ((e - eps) / e).abs() < 1e-12).map(|&(_, v)| v)
}

pub const PRESETS: &[ProblemPreset] = &[
    ProblemPreset {
        name: "spp",
        dim: 1,
        origin: [0.0, 0.0],
        length: [1.0, 0.0],
        kappa: 1.0,
        gamma: 2.0,
        eps_list: &[0.5, 0.1, 0.01],
        default_eps: 0.1,
        cfl_table: &[(0.5, 0.8), (0.1, 0.8), (0.01, 0.1)],
        default_cfl: 0.8,
        lambda0: 1.0,
        c_table: &[],
        default_c: 1.0,
        t_end: 0.1,
        default_n: 50,
        init: spp_init,
    },
    ProblemPreset {
        name: "caw",
        dim: 1,
        origin: [-1.0, 0.0],
        length: [2.0, 0.0],
        kappa: 1.0,
        gamma: 1.4,
        eps_list: &[0.1],
        default_eps: 0.1,
        cfl_table: &[(0.1, 0.9)],
        default_cfl: 0.9,
        lambda0: 1.0,
        c_table: &[],
        default_c: 1.0,
        t_end: 0.08,
        default_n: 1000,
        init: caw_init,
    },
    ProblemPreset {
        name: "riemann",
        dim: 1,
        origin: [0.0, 0.0],
        length: [1.0, 0.0],
        kappa: 1.0,
        gamma: 2.0,
        eps_list: &[0.8, 0.3, 0.05],
        default_eps: 0.3,
        cfl_table: &[(0.8, 0.1), (0.3, 0.5), (0.05, 0.5)],
        default_cfl: 0.5,
        lambda0: 1.0,
        c_table: &[],
        default_c: 1.0,
        t_end: 0.05,
        default_n: 1000,
        init: riemann_init,
    },
    ProblemPreset {
        name: "gresho",
        dim: 2,
        origin: [0.0, 0.0],
        length: [1.0, 1.0],
        kappa: 1.0,
        gamma: 1.4,
        eps_list: &[0.1, 0.01, 0.001],
        default_eps: 0.1,
        cfl_table: &[(0.1, 0.5), (0.01, 0.5), (0.001, 0.1)],
        default_cfl: 0.5,
        lambda0: 1.0,
        c_table: &[(0.1, 100.0), (0.01, 200.0), (0.001, 200.0)],
        default_c: 200.0,
        t_end: GRESHO_RADIUS * PI,
        default_n: 100,
        init: gresho_init,
    },
    // Same problem with the smaller adaptive factor used for the contour plots.
    ProblemPreset {
        name: "gresho-contour",
        dim: 2,
        origin: [0.0, 0.0],
        length: [1.0, 1.0],
        kappa: 1.0,
        gamma: 1.4,
        eps_list: &[0.1, 0.01, 0.001],
        default_eps: 0.1,
        cfl_table: &[(0.1, 0.5), (0.01, 0.5), (0.001, 0.1)],
        default_cfl: 0.5,
        lambda0: 1.0,
        c_table: &[(0.1, 30.0), (0.01, 200.0), (0.001, 200.0)],
        default_c: 200.0,
        t_end: GRESHO_RADIUS * PI,
        default_n: 100,
        init: gresho_init,
    },
    ProblemPreset {
        name: "vortex",
        dim: 2,
        origin: [0.0, 0.0],
        length: [1.0, 1.0],
        kappa: 1.0,
        gamma: 1.4,
        eps_list: &[0.1, 0.01],
        default_eps: 0.1,
        cfl_table: &[(0.1, 0.5), (0.01, 0.5)],
        default_cfl: 0.5,
        lambda0: 1.0,
        c_table: &[(0.1, 30.0), (0.01, 200.0)],
        default_c: 200.0,
        t_end: 1.0 / 0.6,
        default_n: 100,
        init: vortex_init,
    },
];

pub fn preset(name: &str) -> Result<&'static ProblemPreset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| Error::UnknownProblem(name.to_string()))
}

fn require_dim(grid: &Grid, problem: &'static str, expected: usize) -> Result<()> {
    if grid.dim() != expected {
        return Err(Error::WrongDimension { problem, expected, actual: grid.dim() });
    }
    Ok(())
}

fn state_from(grid: &Grid, f: impl Fn([f64; 2]) -> (f64, [f64; 2])) -> Result<State> {
    let rho = ScalarField::from_fn(grid, |x| f(x).0);
    let u = VectorField::from_fn(grid, |x| f(x).1);
    State::from_velocity(0.0, rho, &u)
}

/// Smooth periodic flow: `ρ = 1 + ε² sin 2πx`, `u = 1 + ε sin 2πx`.
pub fn spp_init(grid: &Grid, eps: f64) -> Result<State> {
    require_dim(grid, "spp", 1)?;
    state_from(grid, |x| {
        let s = (2.0 * PI * x[0]).sin();
        (1.0 + eps * eps * s, [1.0 + eps * s, 0.0])
    })
}

/// Two acoustic pulses running into each other on `[-1, 1]`.
pub fn caw_init(grid: &Grid, eps: f64) -> Result<State> {
    require_dim(grid, "caw", 1)?;
    let gamma: f64 = 1.4;
    state_from(grid, |x| {
        let c = 1.0 - (2.0 * PI * x[0]).cos();
        let sign = if x[0] > 0.0 {
            1.0
        } else if x[0] < 0.0 {
            -1.0
        } else {
            0.0
        };
        (0.955 + 0.5 * eps * c, [-sign * gamma.sqrt() * c, 0.0])
    })
}

/// Four-state periodic Riemann data given as density and momentum.
pub fn riemann_init(grid: &Grid, eps: f64) -> Result<State> {
    require_dim(grid, "riemann", 1)?;
    let e2 = eps * eps;
    let piece = |x: f64| {
        if 0.2 < x && x <= 0.3 {
            (1.0 + e2, 1.0)
        } else if 0.3 < x && x <= 0.7 {
            (1.0, 1.0 + 0.5 * e2)
        } else if 0.7 < x && x <= 0.8 {
            (1.0 - e2, 1.0)
        } else {
            (1.0, 1.0 - 0.5 * e2)
        }
    };
    let rho = ScalarField::from_fn(grid, |x| piece(x[0]).0);
    let m = VectorField::from_fn(grid, |x| [piece(x[0]).1, 0.0]);
    State::new(0.0, rho, m)
}

pub const GRESHO_RADIUS: f64 = 0.4;
const GRESHO_DRIFT: f64 = 0.1;

/// Angular velocity of the Gresho vortex.
pub fn gresho_u_theta(r: f64) -> f64 {
    let q = r / GRESHO_RADIUS;
    if q < 0.5 {
        2.0 * q
    } else if q < 1.0 {
        2.0 * (1.0 - q)
    } else {
        0.0
    }
}

/// Second-order pressure perturbation `p₂` of the Gresho vortex.
pub fn gresho_p2(r: f64) -> f64 {
    let q = r / GRESHO_RADIUS;
    if q < 0.5 {
        2.0 * q * q + 2.0 - 16f64.ln()
    } else if q < 1.0 {
        2.0 * q * q - 8.0 * q + 4.0 * q.ln() + 6.0
    } else {
        0.0
    }
}

/// Gresho vortex of radius 0.4 on the unit square, drifting with `u₁ = 0.1`.
pub fn gresho_init(grid: &Grid, eps: f64) -> Result<State> {
    require_dim(grid, "gresho", 2)?;
    let gamma = 1.4;
    state_from(grid, |x| {
        let (dx, dy) = (x[0] - 0.5, x[1] - 0.5);
        let r = dx.hypot(dy);
        let rho = 1.0 + eps * eps * gresho_p2(r) / gamma;
        if r == 0.0 {
            return (rho, [GRESHO_DRIFT, 0.0]);
        }
        let ut = gresho_u_theta(r);
        (rho, [GRESHO_DRIFT - dy / r * ut, dx / r * ut])
    })
}

/// Radial profile of the travelling-vortex density perturbation.
pub fn vortex_k(q: f64) -> f64 {
    2.0 * q.cos() + 2.0 * q * q.sin() + (2.0 * q).cos() / 8.0 + q * (2.0 * q).sin() / 4.0 + 0.75 * q * q
}

/// Travelling vortex on the unit square advected by `u₁ = 0.6`.
pub fn vortex_init(grid: &Grid, eps: f64) -> Result<State> {
    require_dim(grid, "vortex", 2)?;
    let amp = (1.5 / (4.0 * PI)).powi(2);
    let k_pi = vortex_k(PI);
    state_from(grid, |x| {
        let r = 4.0 * PI * (x[0] - 0.5).hypot(x[1] - 0.5);
        if r >= PI {
            return (110.0, [0.6, 0.0]);
        }
        let swirl = 1.5 * (1.0 + r.cos());
        (110.0 + eps * eps * amp * (vortex_k(r) - k_pi), [0.6 + swirl * (0.5 - x[1]), swirl * (x[0] - 0.5)])
    })
}
