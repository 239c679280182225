//! Direct solves of the two implicit operators of the scheme.
//!
//! On a uniform periodic grid every stencil operator is circulant (1D) or
//! block circulant with circulant blocks (2D), so all of them are diagonal in
//! the discrete Fourier basis. With the forward transform
//! `X_j = Σ_k x_k exp(-2πi jk/N)` the per-mode eigenvalues are
//!
//! * compact Laplacian: `μ = -Σ_i 4 sin²(θ_i/2) / h²`
//! * central difference `D_i`: `η_i = i sin(θ_i) / h`
//! * wide Laplacian: `ω = Σ_i η_i² = -Σ_i sin²(θ_i) / h²`
//!
//! with `θ_i = 2π j_i / N_i`. The momentum operator `I - Δt λ h L_c` has
//! symbol `v = 1 - Δt λ h μ` and the mass operator
//! `v - (Δt/ε)² p'(ρ₀) v⁻¹ L_w` has symbol `s = v + (Δt/ε)² p'(ρ₀) (-ω) / v`.
//! Both are `>= 1`, so the solves are unconditionally well posed.
//!
//! Solves are aligned to a translation-canonical starting cell before the
//! transform, which makes them commute bitwise with periodic shifts of the
//! right-hand side (unless the data is itself periodic with a shorter period,
//! where the result is only equivariant to rounding).

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlannerScalar};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operators::{ScalarField, VectorField};
use crate::scheme::FluidParams;

/// Imaginary residue allowed after an inverse transform, relative to `‖b‖_∞`.
pub const IMAG_TOL: f64 = 1e-13;

/// Operator eigenvalues per Fourier mode; depends only on the grid.
#[derive(Debug, Clone)]
pub struct ModeTable {
    grid: Grid,
    mu: Vec<f64>,
    eta: Vec<[f64; 2]>,
    omega: Vec<f64>,
}

impl ModeTable {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.cell_count();
        let h = grid.h();
        let mut mu = Vec::with_capacity(n);
        let mut eta = Vec::with_capacity(n);
        let mut omega = Vec::with_capacity(n);
        for k in 0..n {
            let idx = grid.multi_index(k);
            let (mut m, mut w, mut e) = (0.0, 0.0, [0.0; 2]);
            for axis in 0..grid.dim() {
                let na = grid.n(axis);
                let j = idx[axis];
                // Evaluate on the folded index so modes j and N-j agree bitwise.
                let (jf, sign) = if 2 * j <= na { (j, 1.0) } else { (na - j, -1.0) };
                let theta = 2.0 * PI * jf as f64 / na as f64;
                let half = (0.5 * theta).sin();
                let s = if 2 * jf == na { 0.0 } else { theta.sin() };
                m -= 4.0 * half * half / (h * h);
                w -= s * s / (h * h);
                e[axis] = sign * s / h;
            }
            mu.push(m);
            omega.push(w);
            eta.push(e);
        }
        Self { grid: *grid, mu, eta, omega }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Imaginary parts of the central-difference eigenvalues per axis.
    pub fn eta(&self) -> &[[f64; 2]] {
        &self.eta
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }
}

/// Symbols of the implicit operators for one time step.
#[derive(Debug, Clone)]
pub struct Symbols {
    modes: Arc<ModeTable>,
    pub dt: f64,
    pub lambda: f64,
    pub h: f64,
    pub eps: f64,
    pub dp0: f64,
    v: Vec<f64>,
    s: Vec<f64>,
}

impl Symbols {
    pub fn from_modes(modes: Arc<ModeTable>, dt: f64, lambda: f64, fluid: &FluidParams) -> Self {
        assert!(dt > 0.0 && dt.is_finite(), "time step must be positive, got {dt}");
        assert!(lambda >= 0.0 && lambda.is_finite(), "diffusion must be non-negative, got {lambda}");
        assert!(fluid.eps > 0.0, "Mach number must be positive");
        let h = modes.grid.h();
        let dp0 = fluid.dp_ref();
        let acoustic = (dt / fluid.eps).powi(2) * dp0;
        let v: Vec<f64> = modes.mu.iter().map(|&mu| 1.0 - dt * lambda * h * mu).collect();
        let s: Vec<f64> = v.iter().zip(&modes.omega).map(|(&v, &w)| v + acoustic * (-w) / v).collect();
        assert!(v.iter().all(|&x| x >= 1.0), "momentum symbol dropped below 1");
        assert!(s.iter().all(|&x| x >= 1.0), "mass symbol dropped below 1");
        Self { modes, dt, lambda, h, eps: fluid.eps, dp0, v, s }
    }

    pub fn grid(&self) -> &Grid {
        &self.modes.grid
    }

    pub fn modes(&self) -> &ModeTable {
        &self.modes
    }

    pub fn mu(&self) -> &[f64] {
        &self.modes.mu
    }

    pub fn eta(&self) -> &[[f64; 2]] {
        &self.modes.eta
    }

    pub fn omega(&self) -> &[f64] {
        &self.modes.omega
    }

    /// Symbol of `I - Δt λ h L_c`.
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Symbol of the mass-update operator.
    pub fn s(&self) -> &[f64] {
        &self.s
    }
}

pub fn build_symbols(grid: &Grid, dt: f64, lambda: f64, fluid: &FluidParams) -> Symbols {
    Symbols::from_modes(Arc::new(ModeTable::new(grid)), dt, lambda, fluid)
}

/// Per-axis transform plans for one grid.
#[derive(Clone)]
pub struct SpectralSolver {
    grid: Grid,
    forward: [Arc<dyn Fft<f64>>; 2],
    inverse: [Arc<dyn Fft<f64>>; 2],
}

impl std::fmt::Debug for SpectralSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSolver").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl SpectralSolver {
    pub fn new(grid: &Grid) -> Self {
        Self::with_directions(grid, FftDirection::Inverse)
    }

    /// A solver whose "inverse" plans run forward, for fault-injection tests.
    #[doc(hidden)]
    pub fn with_corrupted_plan(grid: &Grid) -> Self {
        Self::with_directions(grid, FftDirection::Forward)
    }

    fn with_directions(grid: &Grid, inverse_dir: FftDirection) -> Self {
        // The scalar planner picks the same algorithm on every machine.
        let mut planner = FftPlannerScalar::<f64>::new();
        let [n0, n1] = grid.shape();
        let forward = [planner.plan_fft_forward(n0), planner.plan_fft_forward(n1)];
        let inverse = [planner.plan_fft(n0, inverse_dir), planner.plan_fft(n1, inverse_dir)];
        Self { grid: *grid, forward, inverse }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Unnormalised forward DFT of a real field.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        buf
    }

    /// Normalised inverse DFT.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spectrum.to_vec();
        self.transform(&mut buf, &self.inverse);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
        buf
    }

    fn transform(&self, buf: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 2]) {
        let [n0, n1] = self.grid.shape();
        plans[0].process(buf);
        if self.grid.dim() == 2 {
            let mut cols = vec![Complex64::new(0.0, 0.0); buf.len()];
            for i1 in 0..n1 {
                for i0 in 0..n0 {
                    cols[i1 + n1 * i0] = buf[i0 + n0 * i1];
                }
            }
            plans[1].process(&mut cols);
            for i1 in 0..n1 {
                for i0 in 0..n0 {
                    buf[i0 + n0 * i1] = cols[i1 + n1 * i0];
                }
            }
        }
    }

    /// Solves `A x = b` for the circulant operator `A` with the given real symbol.
    pub fn solve_with_symbol(&self, b: &ScalarField, symbol: &[f64]) -> Result<ScalarField> {
        if b.grid() != &self.grid || symbol.len() != self.grid.cell_count() {
            return Err(Error::GridMismatch);
        }
        let shift = canonical_shift(&self.grid, b.values());
        let aligned = rotate(&self.grid, b.values(), shift, true);
        let mut spectrum = self.forward(&aligned);
        for (z, &sym) in spectrum.iter_mut().zip(symbol) {
            *z /= sym;
        }
        let x = self.inverse(&spectrum);
        let tolerance = IMAG_TOL * b.max_abs();
        let residue = x.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        if residue > tolerance {
            return Err(Error::ImaginaryResidue { residue, tolerance });
        }
        let re: Vec<f64> = x.iter().map(|z| z.re).collect();
        ScalarField::from_values(&self.grid, rotate(&self.grid, &re, shift, false))
    }

    /// `(I - Δt λ h L_c)⁻¹ b`.
    pub fn solve_helmholtz(&self, b: &ScalarField, symbols: &Symbols) -> Result<ScalarField> {
        self.solve_with_symbol(b, symbols.v())
    }

    /// Componentwise `(I - Δt λ h L_c)⁻¹ b`.
    pub fn solve_helmholtz_vec(&self, b: &VectorField, symbols: &Symbols) -> Result<VectorField> {
        let comps = b.comps().iter().map(|c| self.solve_helmholtz(c, symbols)).collect::<Result<Vec<_>>>()?;
        VectorField::from_components(&self.grid, comps)
    }

    /// Inverse of the mass-update operator.
    pub fn solve_mass_operator(&self, b: &ScalarField, symbols: &Symbols) -> Result<ScalarField> {
        self.solve_with_symbol(b, symbols.s())
    }
}

/// One-shot Helmholtz solve; builds transform plans on the fly.
pub fn solve_helmholtz(b: &ScalarField, symbols: &Symbols) -> Result<ScalarField> {
    SpectralSolver::new(symbols.grid()).solve_helmholtz(b, symbols)
}

/// One-shot mass-operator solve; builds transform plans on the fly.
pub fn solve_mass_operator(b: &ScalarField, symbols: &Symbols) -> Result<ScalarField> {
    SpectralSolver::new(symbols.grid()).solve_mass_operator(b, symbols)
}

/// `‖M⁻¹ b - mean(b)‖_∞` for the mass operator `M`; vanishes like `ε²`.
pub fn projector_limit_check(grid: &Grid, dt: f64, lambda: f64, fluid: &FluidParams, b: &ScalarField) -> Result<f64> {
    if fluid.eps > 1e-4 {
        return Err(Error::EpsilonTooLarge(fluid.eps));
    }
    let symbols = build_symbols(grid, dt, lambda, fluid);
    let x = solve_mass_operator(b, &symbols)?;
    let mean = b.mean();
    Ok(x.values().iter().fold(0.0, |m, v| m.max((v - mean).abs())))
}

/// Shift (per axis) of the translation-canonical starting cell of `values`.
///
/// The winner is the cell from which the periodically wrapped array is
/// lexicographically smallest under `f64::total_cmp`, so shifting the input
/// by `s` shifts the result by `s`.
fn canonical_shift(grid: &Grid, values: &[f64]) -> [usize; 2] {
    let n = values.len();
    let Some(min) = values.iter().copied().min_by(f64::total_cmp) else {
        return [0, 0];
    };
    let mut cands: Vec<usize> = (0..n).filter(|&k| values[k].total_cmp(&min) == Ordering::Equal).collect();
    if cands.len() == n {
        return [0, 0];
    }
    let [n0, n1] = grid.shape();
    let mut p = 1;
    while cands.len() > 1 && p < n {
        let [o0, o1] = grid.multi_index(p);
        let at = |c: usize| {
            let [c0, c1] = grid.multi_index(c);
            values[grid.flat_index((c0 + o0) % n0, (c1 + o1) % n1)]
        };
        let best = cands.iter().map(|&c| at(c)).min_by(f64::total_cmp).expect("non-empty");
        cands.retain(|&c| at(c).total_cmp(&best) == Ordering::Equal);
        p += 1;
    }
    grid.multi_index(cands[0])
}

/// `forward`: out[J] = v[J + shift]; otherwise out[K] = v[K - shift].
fn rotate(grid: &Grid, values: &[f64], shift: [usize; 2], forward: bool) -> Vec<f64> {
    if shift == [0, 0] {
        return values.to_vec();
    }
    let [n0, n1] = grid.shape();
    let mut out = vec![0.0; values.len()];
    for i1 in 0..n1 {
        for i0 in 0..n0 {
            let (s0, s1) = ((i0 + shift[0]) % n0, (i1 + shift[1]) % n1);
            if forward {
                out[grid.flat_index(i0, i1)] = values[grid.flat_index(s0, s1)];
            } else {
                out[grid.flat_index(s0, s1)] = values[grid.flat_index(i0, i1)];
            }
        }
    }
    out
}
