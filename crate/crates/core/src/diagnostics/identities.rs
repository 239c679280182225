//! Exact discrete balances satisfied by every step, and the face-wise λ
//! requirements behind positivity and energy stability.

use crate::grid::FaceRef;
use crate::operators::{div_h, face_avg, face_jump, ScalarField};
use crate::scheme::{face_requirements, FluidParams, State};

/// Signed residual of a discrete identity next to its natural size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    pub residual: f64,
    /// Sum of the absolute contributions of every term.
    pub scale: f64,
}

impl IdentityResidual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual.abs() / self.scale
        } else {
            self.residual.abs()
        }
    }
}

/// Accumulates a sum and the sum of absolute values of its contributions.
#[derive(Default)]
struct Term {
    sum: f64,
    abs: f64,
}

impl Term {
    fn add(&mut self, x: f64) {
        self.sum += x;
        self.abs += x.abs();
    }
}

/// Renormalised mass balance for `B(ρ)` across the step `old -> new`.
///
/// Evaluates
///
/// ```text
/// Σ|K| (B' - B)/Δt + Σ|K| (ρB'(ρ) - B(ρ))ⁿ⁺¹ div_h uⁿ⁺¹
///   = -λ Σ_σ |σ| [B'(ρⁿ⁺¹)][ρⁿ⁺¹]
///     - Σ|K| (B(ρⁿ) - B(ρⁿ⁺¹) - B'(ρⁿ⁺¹)(ρⁿ - ρⁿ⁺¹))/Δt
///     + Σ_K Σ_σ∈E(K) |σ| ½([B(ρⁿ⁺¹)]_σ,K - B'(ρ_Kⁿ⁺¹)[ρⁿ⁺¹]_σ,K) u_Lⁿ⁺¹·n_σ,K
/// ```
///
/// and returns LHS - RHS. The scale also counts the mass-equation terms
/// weighted by `|B'|`, since that is the size the solver rounds against.
pub fn renorm_residual(
    old: &State,
    new: &State,
    lambda: f64,
    dt: f64,
    b: impl Fn(f64) -> f64,
    db: impl Fn(f64) -> f64,
) -> IdentityResidual {
    let g = *new.rho.grid();
    let (vol, area) = (g.cell_volume(), g.face_area());
    let (r0, r1) = (&old.rho, &new.rho);
    let u1 = new.velocity();
    let div = div_h(&u1);
    let b1 = r1.map(&b);
    let db1 = r1.map(&db);

    let (mut time, mut work, mut diffusion, mut convexity, mut pairing) =
        (Term::default(), Term::default(), Term::default(), Term::default(), Term::default());
    let mut solver_scale = 0.0;
    for k in 0..g.cell_count() {
        time.add(vol * (b1[k] - b(r0[k])) / dt);
        work.add(vol * (r1[k] * db1[k] - b1[k]) * div[k]);
        convexity.add(-vol * (b(r0[k]) - b1[k] - db1[k] * (r0[k] - r1[k])) / dt);
        solver_scale += vol * db1[k].abs() * (r0[k].abs() + r1[k].abs()) / dt;
        for face in g.faces_of(k) {
            let ul = u1.at(g.outer(face));
            let un = ul[face.axis] * face.orientation.sign();
            pairing.add(area * 0.5 * (face_jump(&b1, face) - db1[k] * face_jump(r1, face)) * un);
        }
    }
    for face in g.faces() {
        diffusion.add(-lambda * area * face_jump(&db1, face) * face_jump(r1, face));
    }
    let lhs = time.sum + work.sum;
    let rhs = diffusion.sum + convexity.sum + pairing.sum;
    IdentityResidual {
        residual: lhs - rhs,
        scale: time.abs + work.abs + diffusion.abs + convexity.abs + pairing.abs + solver_scale,
    }
}

/// Kinetic-energy balance of one step, with the pressure work in both forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeBalance {
    /// With the linearised pressure work `(p'(ρ₀)/ε²) Σ|K| ρⁿ⁺¹ div_h uⁿ⁺¹`;
    /// exact for the evolved scheme.
    pub linear: IdentityResidual,
    /// With the nonlinear pressure work `Σ|K| p(ρⁿ⁺¹)/ε² div_h uⁿ⁺¹`; off by
    /// the pressure linearisation error.
    pub nonlinear: f64,
}

/// Evaluates
///
/// ```text
/// Σ|K| (ρⁿ⁺¹|uⁿ⁺¹|² - ρⁿ|uⁿ|²)/2Δt - Σ|K| π(ρⁿ⁺¹)/ε² div_h uⁿ⁺¹
///   = -Σ|K| ρⁿ|uⁿ⁺¹ - uⁿ|²/2Δt
///     - Σ_σ |σ| ( λ {ρⁿ⁺¹}|[uⁿ⁺¹]|² + {ρⁿ⁺¹uⁿ⁺¹}·n [|uⁿ⁺¹|²/2]
///                 - [uⁿ⁺¹]·{ρⁿuⁿ(uⁿ·n)} )
/// ```
///
/// for `π(ρ) = p'(ρ₀) ρ` and for `π = p`.
pub fn ke_balance_residual(old: &State, new: &State, lambda: f64, dt: f64, fluid: &FluidParams) -> KeBalance {
    let g = *new.rho.grid();
    let (vol, area) = (g.cell_volume(), g.face_area());
    let dim = g.dim();
    let (r0, r1) = (&old.rho, &new.rho);
    let (u0, u1) = (old.velocity(), new.velocity());
    let div = div_h(&u1);
    let inv_eps2 = 1.0 / (fluid.eps * fluid.eps);
    let dp0 = fluid.dp_ref();

    let (mut time, mut work, mut work_nl, mut damping) = (Term::default(), Term::default(), 0.0, Term::default());
    let (mut diffusion, mut transport, mut convection) = (Term::default(), Term::default(), Term::default());
    let mut solver_scale = 0.0;
    let sq = |v: [f64; 2]| v[0] * v[0] + v[1] * v[1];
    for k in 0..g.cell_count() {
        let (a, b) = (u0.at(k), u1.at(k));
        time.add(vol * (r1[k] * sq(b) - r0[k] * sq(a)) / (2.0 * dt));
        work.add(-vol * dp0 * inv_eps2 * r1[k] * div[k]);
        work_nl += -vol * fluid.p(r1[k]) * inv_eps2 * div[k];
        damping.add(-vol * r0[k] * sq([b[0] - a[0], b[1] - a[1]]) / (2.0 * dt));
        let (m0, m1) = (old.m.at(k), new.m.at(k));
        solver_scale += vol * sq(b).sqrt() * (sq(m0).sqrt() + sq(m1).sqrt()) / dt;
    }
    let ke1 =
        ScalarField::from_values(&g, (0..g.cell_count()).map(|k| 0.5 * sq(u1.at(k))).collect()).expect("same grid");
    for face in g.faces() {
        let (k, l) = (face.cell, g.outer(face));
        let axis = face.axis;
        let (uk, ul) = (u1.at(k), u1.at(l));
        let ju = [ul[0] - uk[0], ul[1] - uk[1]];
        diffusion.add(-area * lambda * face_avg(r1, face) * sq(ju));
        let avg_mn = 0.5 * (r1[l] * ul[axis] + r1[k] * uk[axis]);
        transport.add(-area * avg_mn * face_jump(&ke1, face));
        let (ak, al) = (u0.at(k), u0.at(l));
        let mut flux = 0.0;
        for i in 0..dim {
            flux += ju[i] * 0.5 * (r0[l] * al[i] * al[axis] + r0[k] * ak[i] * ak[axis]);
        }
        convection.add(area * flux);
    }
    let rhs = damping.sum + diffusion.sum + transport.sum + convection.sum;
    let scale = time.abs + work.abs + damping.abs + diffusion.abs + transport.abs + convection.abs + solver_scale;
    KeBalance {
        linear: IdentityResidual { residual: time.sum + work.sum - rhs, scale },
        nonlinear: time.sum + work_nl - rhs,
    }
}

/// λ requirements on one face, evaluated at the new time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceMargin {
    pub face: FaceRef,
    /// Internal-energy requirement.
    pub internal: f64,
    /// Kinetic-energy requirement (convective flux at the old level).
    pub kinetic: f64,
    /// `max(|u_L·n_σ,K|, |u_K·n_σ,L|) / 2`.
    pub positivity: f64,
    /// `λ - max(internal, kinetic, positivity)`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaReport {
    pub faces: Vec<FaceMargin>,
    pub worst_margin: f64,
    pub worst_face: Option<FaceRef>,
}

impl LambdaReport {
    pub fn satisfied(&self) -> bool {
        self.worst_margin >= 0.0
    }
}

/// A-posteriori check of the λ conditions for the step `old -> new`.
pub fn check_lambda_conditions(old: &State, new: &State, lambda: f64, fluid: &FluidParams, floor: f64) -> LambdaReport {
    let (u0, u1) = (old.velocity(), new.velocity());
    let faces: Vec<FaceMargin> = face_requirements(&new.rho, &u1, &old.rho, &u0, fluid, floor)
        .map(|r| {
            let g = new.rho.grid();
            let (k, l) = (r.face.cell, g.outer(r.face));
            let positivity = 0.5 * u1.at(l)[r.face.axis].abs().max(u1.at(k)[r.face.axis].abs());
            let required = r.internal.max(r.kinetic).max(positivity);
            FaceMargin { face: r.face, internal: r.internal, kinetic: r.kinetic, positivity, margin: lambda - required }
        })
        .collect();
    let worst = faces.iter().min_by(|a, b| a.margin.total_cmp(&b.margin));
    LambdaReport { worst_margin: worst.map_or(lambda, |f| f.margin), worst_face: worst.map(|f| f.face), faces }
}
