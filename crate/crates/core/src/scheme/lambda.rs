//! Time step and numerical diffusion selection.

use crate::grid::{FaceRef, Grid};
use crate::operators::{ScalarField, VectorField};

use super::params::{FluidParams, LambdaMode, SchemeParams, State};

/// `Δt = C h / max|u|`, or `C h` for a fluid at rest, clamped to `t_end`.
pub fn compute_dt(state: &State, params: &SchemeParams, grid: &Grid) -> f64 {
    let umax = state.velocity().magnitude().max_abs();
    let dt = if umax > 0.0 { params.cfl * grid.h() / umax } else { params.cfl * grid.h() };
    dt.min(params.t_end - state.t)
}

pub fn compute_lambda(state: &State, params: &SchemeParams, fluid: &FluidParams) -> f64 {
    match params.lambda_mode {
        LambdaMode::Constant => params.lambda0,
        LambdaMode::Adaptive => {
            let u = state.velocity();
            params.c * max_face_requirement(&state.rho, &u, &state.rho, &u, fluid, params.jump_floor)
        }
        LambdaMode::Bounds => {
            let u = state.velocity();
            let umax = u.magnitude().max_abs();
            let g = *state.rho.grid();
            let s_min = g
                .faces()
                .map(|f| vec_jump_norm(&u, f))
                .filter(|&s| s > params.jump_floor)
                .fold(f64::INFINITY, f64::min);
            if s_min.is_finite() {
                bounds_lambda(state.rho.min(), state.rho.max(), umax, s_min, fluid)
            } else {
                params.lambda0
            }
        }
    }
}

/// `max{ P̄'' ū / (2 P̲''), 2 ρ̄ ū² / (ρ̲ s̲) }` with `P''` extrema over `[ρ̲, ρ̄]`.
pub fn bounds_lambda(rho_min: f64, rho_max: f64, u_max: f64, s_min: f64, fluid: &FluidParams) -> f64 {
    // P'' is a power of ρ, hence monotone: its extrema sit at the endpoints.
    let (a, b) = (fluid.potential_d2(rho_min), fluid.potential_d2(rho_max));
    let (lo, hi) = (a.min(b), a.max(b));
    (hi * u_max / (2.0 * lo)).max(2.0 * rho_max * u_max * u_max / (rho_min * s_min))
}

/// Face-wise internal- and kinetic-energy requirements on λ.
///
/// The internal-energy term uses `(ρ, u)` and the kinetic term uses
/// `(ρ, u)` together with the convective flux of `(rho_conv, u_conv)`. The
/// adaptive mode passes the same level for both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceRequirement {
    pub face: FaceRef,
    pub internal: f64,
    pub kinetic: f64,
}

pub fn face_requirements<'a>(
    rho: &'a ScalarField,
    u: &'a VectorField,
    rho_conv: &'a ScalarField,
    u_conv: &'a VectorField,
    fluid: &'a FluidParams,
    floor: f64,
) -> impl Iterator<Item = FaceRequirement> + 'a {
    let g = *rho.grid();
    let dim = g.dim();
    (0..g.cell_count()).flat_map(move |cell| {
        (0..dim).map(move |axis| {
            let face = FaceRef { cell, axis, orientation: crate::grid::Orientation::Plus };
            let (k, l) = (cell, g.outer(face));
            let (uk, ul) = (u.at(k), u.at(l));
            let (rk, rl) = (rho[k], rho[l]);

            let mut internal = 0.0;
            let jr = rl - rk;
            let jdp = fluid.potential_d1(rl) - fluid.potential_d1(rk);
            if jr.abs() > floor && jdp.abs() > floor {
                let pl = secant_d2(fluid, rk, rl);
                let pk = secant_d2(fluid, rl, rk);
                internal = jr * (pl * ul[axis] - pk * uk[axis]) / (4.0 * jdp);
            }

            let mut kinetic = 0.0;
            let ju = [ul[0] - uk[0], ul[1] - uk[1]];
            let ju2 = ju[0] * ju[0] + ju[1] * ju[1];
            if ju2.sqrt() > floor {
                let avg_mn = 0.5 * (rl * ul[axis] + rk * uk[axis]);
                let jke = 0.5 * (ul[0] * ul[0] + ul[1] * ul[1]) - 0.5 * (uk[0] * uk[0] + uk[1] * uk[1]);
                let (ck, cl) = (u_conv.at(k), u_conv.at(l));
                let (sk, sl) = (rho_conv[k], rho_conv[l]);
                let mut flux = 0.0;
                for i in 0..dim {
                    flux += ju[i] * 0.5 * (sl * cl[i] * cl[axis] + sk * ck[i] * ck[axis]);
                }
                kinetic = (-avg_mn * jke + flux) / (0.5 * (rl + rk) * ju2);
            }
            FaceRequirement { face, internal, kinetic }
        })
    })
}

/// `max_σ max(T₁, T₂)` clipped at zero.
pub fn max_face_requirement(
    rho: &ScalarField,
    u: &VectorField,
    rho_conv: &ScalarField,
    u_conv: &VectorField,
    fluid: &FluidParams,
    floor: f64,
) -> f64 {
    face_requirements(rho, u, rho_conv, u_conv, fluid, floor).fold(0.0, |m, r| m.max(r.internal).max(r.kinetic))
}

/// `|[u]_σ|` for the face.
fn vec_jump_norm(u: &VectorField, face: FaceRef) -> f64 {
    let g = u.grid();
    let (a, b) = (u.at(face.cell), u.at(g.outer(face)));
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
}

const GAUSS_NODES: [f64; 4] = [0.1834346424956498, 0.525532409916329, 0.7966664774136267, 0.9602898564975363];
const GAUSS_WEIGHTS: [f64; 4] = [0.362683783378362, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];

/// `2 (P(b) - P(a) - P'(a)(b - a)) / (b - a)²`, the mean-value `P''` between
/// `a` and `b` weighted towards `a`.
///
/// Near `a == b` the difference quotient cancels catastrophically, so it is
/// evaluated as `2 ∫₀¹ P''(a + t(b - a)) (1 - t) dt` by Gauss-Legendre
/// quadrature instead.
pub fn secant_d2(fluid: &FluidParams, a: f64, b: f64) -> f64 {
    let d = b - a;
    if d.abs() > 0.25 * a.min(b) {
        return 2.0 * (fluid.potential(b) - fluid.potential(a) - fluid.potential_d1(a) * d) / (d * d);
    }
    let mut acc = 0.0;
    for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
        for t in [0.5 * (1.0 - x), 0.5 * (1.0 + x)] {
            acc += w * fluid.potential_d2(a + t * d) * (1.0 - t);
        }
    }
    // The half-width of [0, 1] cancels the factor 2.
    acc
}
