use crate::error::{Error, Result};
use crate::operators::{ScalarField, VectorField};

/// Pressure law `p = κ ρ^γ`, Mach number and linearisation density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    pub kappa: f64,
    pub gamma: f64,
    pub eps: f64,
    pub rho0: f64,
}

impl FluidParams {
    pub fn new(kappa: f64, gamma: f64, eps: f64, rho0: f64) -> Result<Self> {
        let check = |ok: bool, what: &str, v: f64| {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} = {v}")))
            }
        };
        check(kappa > 0.0, "kappa must be positive, got kappa", kappa)?;
        check(gamma > 1.0, "gamma must exceed 1, got gamma", gamma)?;
        check(eps > 0.0, "epsilon must be positive, got epsilon", eps)?;
        check(rho0 > 0.0, "rho0 must be positive, got rho0", rho0)?;
        Ok(Self { kappa, gamma, eps, rho0 })
    }

    pub fn with_rho0(self, rho0: f64) -> Result<Self> {
        Self::new(self.kappa, self.gamma, self.eps, rho0)
    }

    /// `p(ρ) = κ ρ^γ`.
    #[inline]
    pub fn p(&self, rho: f64) -> f64 {
        self.kappa * rho.powf(self.gamma)
    }

    /// `p'(ρ) = κ γ ρ^(γ-1)`.
    #[inline]
    pub fn dp(&self, rho: f64) -> f64 {
        self.kappa * self.gamma * rho.powf(self.gamma - 1.0)
    }

    /// `p'(ρ₀)`, the coefficient of the linearised pressure gradient.
    pub fn dp_ref(&self) -> f64 {
        self.dp(self.rho0)
    }

    /// Pressure potential `P(ρ) = κ ρ^γ / (γ - 1)`.
    #[inline]
    pub fn potential(&self, rho: f64) -> f64 {
        self.p(rho) / (self.gamma - 1.0)
    }

    #[inline]
    pub fn potential_d1(&self, rho: f64) -> f64 {
        self.kappa * self.gamma * rho.powf(self.gamma - 1.0) / (self.gamma - 1.0)
    }

    #[inline]
    pub fn potential_d2(&self, rho: f64) -> f64 {
        self.kappa * self.gamma * rho.powf(self.gamma - 2.0)
    }
}

pub fn pressure(rho: f64, fluid: &FluidParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::NonPositiveDensity(rho));
    }
    Ok(fluid.p(rho))
}

pub fn pressure_potential(rho: f64, fluid: &FluidParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::NonPositiveDensity(rho));
    }
    Ok(fluid.potential(rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaMode {
    /// Fixed `λ₀` every step.
    Constant,
    /// `c` times the explicit-level face condition.
    Adaptive,
    /// A-priori bound from the solution extrema.
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub cfl: f64,
    pub lambda_mode: LambdaMode,
    /// λ in constant mode, fallback in bounds mode.
    pub lambda0: f64,
    /// Safety factor of the adaptive mode.
    pub c: f64,
    pub t_end: f64,
    pub max_steps: u64,
    /// Jumps at or below this magnitude count as zero.
    pub jump_floor: f64,
}

impl SchemeParams {
    pub const DEFAULT_JUMP_FLOOR: f64 = 1e-12;

    pub fn constant(cfl: f64, lambda: f64, t_end: f64) -> Self {
        Self {
            cfl,
            lambda_mode: LambdaMode::Constant,
            lambda0: lambda,
            c: 1.0,
            t_end,
            max_steps: u64::MAX,
            jump_floor: Self::DEFAULT_JUMP_FLOOR,
        }
    }

    pub fn adaptive(cfl: f64, c: f64, t_end: f64) -> Self {
        Self { lambda_mode: LambdaMode::Adaptive, c, ..Self::constant(cfl, 0.0, t_end) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.cfl > 0.0) || !self.cfl.is_finite() {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if !(self.lambda0 >= 0.0) || !self.lambda0.is_finite() {
            return bad(format!("lambda must be non-negative, got {}", self.lambda0));
        }
        if self.lambda_mode == LambdaMode::Adaptive && (!(self.c > 0.0) || !self.c.is_finite()) {
            return bad(format!("adaptive factor c must be positive, got {}", self.c));
        }
        if !self.t_end.is_finite() {
            return bad(format!("t_end must be finite, got {}", self.t_end));
        }
        if !(self.jump_floor >= 0.0) {
            return bad(format!("jump_floor must be non-negative, got {}", self.jump_floor));
        }
        Ok(())
    }
}

/// Density and momentum at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    /// Number of steps taken to reach this state.
    pub n: u64,
    pub rho: ScalarField,
    pub m: VectorField,
}

impl State {
    pub fn new(t: f64, rho: ScalarField, m: VectorField) -> Result<Self> {
        if rho.grid() != m.grid() {
            return Err(Error::GridMismatch);
        }
        if let Some(&bad) = rho.values().iter().find(|v| !(**v > 0.0)) {
            return Err(Error::NonPositiveDensity(bad));
        }
        Ok(Self { t, n: 0, rho, m })
    }

    pub fn from_velocity(t: f64, rho: ScalarField, u: &VectorField) -> Result<Self> {
        let m = u.map_components(|c| c.zip_map(&rho, |a, r| a * r));
        Self::new(t, rho, m)
    }

    /// `u = m / ρ` componentwise.
    pub fn velocity(&self) -> VectorField {
        self.m.map_components(|c| c.zip_map(&self.rho, |a, r| a / r))
    }

    pub fn mass(&self) -> f64 {
        self.rho.integral()
    }
}
