//! `apflow validate`: self-checks of operators, solver and scheme.

use std::fmt;

use apflow::benchmarks::{preset, PRESETS};
use apflow::diagnostics::{ap_indicators, check_lambda_conditions, ke_balance_residual, renorm_residual};
use apflow::operators::{dense_matrix, DenseMatrix, OperatorKind};
use apflow::scheme::{run_with, FluidParams, Observer, State, StepInfo, Stepper};
use apflow::spectral::{build_symbols, projector_limit_check, SpectralSolver};
use apflow::{Grid, ScalarField};

#[derive(Debug, Clone, Default)]
pub struct ValidateOptions {
    /// λ for the acoustic-wave advisory; the preset value when `None`.
    pub caw_lambda: Option<f64>,
    /// Swap the inverse transform for a forward one (fault injection).
    pub corrupt_plan: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub name: &'static str,
    pub passed: bool,
    /// Advisory items are reported but never fail validation.
    pub advisory: bool,
    pub detail: String,
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match (self.advisory, self.passed) {
            (true, true) => "ADVISORY ok",
            (true, false) => "ADVISORY violated",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        write!(f, "{tag:<17} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub items: Vec<Item>,
}

impl ValidationReport {
    pub fn failures(&self) -> usize {
        self.items.iter().filter(|i| !i.advisory && !i.passed).count()
    }

    pub fn item(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.name == name)
    }
}

pub fn cmd_validate(opts: &ValidateOptions) -> ValidationReport {
    let items = vec![
        operator_duality(),
        spectral_vs_dense(opts.corrupt_plan),
        symbol_bounds(),
        identity_residuals(),
        positivity(),
        ap_ratios(),
        caw_lambda_advisory(opts.caw_lambda),
    ];
    ValidationReport { items }
}

fn item(name: &'static str, passed: bool, detail: String) -> Item {
    Item { name, passed, advisory: false, detail }
}

fn failed(name: &'static str, err: impl fmt::Display) -> Item {
    item(name, false, err.to_string())
}

fn test_grids() -> Vec<Grid> {
    [Grid::line(7, 0.0, 1.0), Grid::line(16, -1.0, 2.0), Grid::unit_square(6), Grid::unit_square(9)]
        .into_iter()
        .map(|g| g.expect("fixed test grids are valid"))
        .collect()
}

/// Deterministic, irregular data in `[-1, 1]`.
fn scrambled(grid: &Grid, salt: f64) -> ScalarField {
    ScalarField::from_values(grid, (0..grid.cell_count()).map(|k| ((k as f64 + salt) * 12.9898).sin()).collect())
        .expect("length matches the grid")
}

fn operator_duality() -> Item {
    const NAME: &str = "operator duality";
    let mut worst: f64 = 0.0;
    for g in test_grids() {
        let (div, grad, lw) = match (
            dense_matrix(OperatorKind::Div, &g),
            dense_matrix(OperatorKind::Grad, &g),
            dense_matrix(OperatorKind::LapWide, &g),
        ) {
            (Ok(d), Ok(gr), Ok(l)) => (d, gr, l),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return failed(NAME, e),
        };
        let scale = grad.max_abs();
        worst = worst.max(div.add_scaled(1.0, &grad.transpose()).max_abs() / scale);
        worst = worst.max(lw.max_abs_diff(&div.matmul(&grad)) / (scale * scale));
    }
    item(NAME, worst <= 1e-13, format!("div = -grad^T and L_w = div grad to {worst:.1e}"))
}

fn spectral_vs_dense(corrupt: bool) -> Item {
    const NAME: &str = "spectral vs dense";
    let mut worst: f64 = 0.0;
    for (i, g) in test_grids().into_iter().enumerate() {
        let fluid = FluidParams::new(1.0, 1.4, [0.5, 0.1, 0.01, 0.3][i], 1.0).expect("valid fluid");
        let (dt, lambda) = (0.4 * g.h(), [1.0, 0.0, 0.7, 2.0][i]);
        let sym = build_symbols(&g, dt, lambda, &fluid);
        let n = g.cell_count();
        let (lc, lw) = match (dense_matrix(OperatorKind::LapCompact, &g), dense_matrix(OperatorKind::LapWide, &g)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return failed(NAME, e),
        };
        let helm = DenseMatrix::identity(n).add_scaled(-dt * lambda * g.h(), &lc);
        let Some(hinv_lw) = helm.solve_matrix(&lw) else { return failed(NAME, "singular Helmholtz matrix") };
        let mass = helm.add_scaled(-(dt / fluid.eps).powi(2) * fluid.dp_ref(), &hinv_lw);
        let solver = if corrupt { SpectralSolver::with_corrupted_plan(&g) } else { SpectralSolver::new(&g) };
        let b = scrambled(&g, i as f64);
        for (spectral, dense) in [
            (solver.solve_helmholtz(&b, &sym), helm.solve(b.values())),
            (solver.solve_mass_operator(&b, &sym), mass.solve(b.values())),
        ] {
            let (x, y) = match (spectral, dense) {
                (Ok(x), Some(y)) => (x, y),
                (Err(e), _) => return failed(NAME, e),
                (_, None) => return failed(NAME, "singular dense operator"),
            };
            let norm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = x.values().iter().zip(&y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            worst = worst.max(diff / norm);
        }
    }
    item(NAME, worst <= 1e-12, format!("max relative difference {worst:.1e}"))
}

fn symbol_bounds() -> Item {
    let mut ok = true;
    let mut count = 0;
    for g in test_grids() {
        for eps in [1.0, 0.1, 1e-3, 1e-6] {
            for lambda in [0.0, 0.5, 3.0] {
                let fluid = FluidParams::new(1.0, 2.0, eps, 1.0).expect("valid fluid");
                let sym = build_symbols(&g, 0.8 * g.h(), lambda, &fluid);
                ok &= sym.v().iter().chain(sym.s()).all(|&x| x >= 1.0);
                count += 1;
            }
        }
    }
    item("symbol bounds", ok, format!("v >= 1 and s >= 1 for {count} parameter sets"))
}

#[derive(Default)]
struct Identities {
    worst: f64,
    fluid: Option<FluidParams>,
}

impl Observer for Identities {
    fn step(&mut self, prev: &State, next: &State, info: &StepInfo) {
        let f = self.fluid.expect("fluid set before the run");
        let (l, dt) = (info.lambda, info.dt);
        let rels = [
            renorm_residual(prev, next, l, dt, |r| r, |_| 1.0).relative(),
            renorm_residual(prev, next, l, dt, |r| r * r, |r| 2.0 * r).relative(),
            renorm_residual(prev, next, l, dt, |r| f.potential(r), |r| f.potential_d1(r)).relative(),
            ke_balance_residual(prev, next, l, dt, &f).linear.relative(),
        ];
        self.worst = rels.into_iter().fold(self.worst, f64::max);
    }
}

fn identity_residuals() -> Item {
    const NAME: &str = "identity residuals";
    let spp = preset("spp").expect("spp preset exists");
    let mut obs = Identities::default();
    for eps in [0.5, 0.1, 0.01] {
        let s = match spp.setup(16, eps) {
            Ok(s) => s.with_t_end(0.1),
            Err(e) => return failed(NAME, e),
        };
        obs.fluid = Some(s.fluid);
        let run = Stepper::new(&s.grid, s.fluid, s.params).and_then(|st| run_with(&st, s.state, &mut [&mut obs]));
        if let Err(e) = run {
            return failed(NAME, e);
        }
    }
    item(NAME, obs.worst <= 1e-9, format!("worst relative residual {:.1e}", obs.worst))
}

fn positivity() -> Item {
    const NAME: &str = "positivity";
    let mut parts = Vec::new();
    let mut ok = true;
    for p in PRESETS {
        let n = if p.dim == 1 { 200 } else { 32 };
        let s = match p.setup(n, p.default_eps) {
            Ok(s) => s,
            Err(e) => return failed(NAME, format!("{}: {e}", p.name)),
        };
        let mass0 = s.state.mass();
        match Stepper::new(&s.grid, s.fluid, s.params).and_then(|st| run_with(&st, s.state, &mut [])) {
            Ok(r) => {
                let drift = (r.final_state.mass() - mass0).abs() / mass0;
                ok &= r.min_rho > 0.0 && drift <= 1e-12;
                parts.push(format!("{} min rho {:.4}", p.name, r.min_rho));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{}: {e}", p.name));
            }
        }
    }
    item(NAME, ok, parts.join(", "))
}

fn ap_ratios() -> Item {
    const NAME: &str = "asymptotic ratios";
    // Odd N: on even grids the checkerboard modes are invisible to the wide
    // Laplacian and are not projected out.
    let g = Grid::unit_square(9).expect("valid grid");
    let b = scrambled(&g, 0.5);
    let dev = |eps: f64| {
        let fluid = FluidParams::new(1.0, 1.4, eps, 1.0)?;
        projector_limit_check(&g, 0.5 * g.h(), 1.0, &fluid, &b)
    };
    let quarter = match (dev(1e-5), dev(5e-6)) {
        (Ok(a), Ok(b)) => a / b,
        (Err(e), _) | (_, Err(e)) => return failed(NAME, e),
    };
    let gresho = preset("gresho").expect("gresho preset exists");
    let div = |eps: f64| -> apflow::Result<f64> {
        let s = gresho.setup(20, eps)?;
        let st = Stepper::new(&s.grid, s.fluid, s.params)?;
        Ok(ap_indicators(&run_with(&st, s.state, &mut [])?.final_state, &s.fluid).div_u_l1)
    };
    let ratio = match (div(0.1), div(0.01)) {
        (Ok(a), Ok(b)) => b / a,
        (Err(e), _) | (_, Err(e)) => return failed(NAME, e),
    };
    let ok = (3.5..=4.5).contains(&quarter) && ratio <= 0.5;
    item(NAME, ok, format!("projection deviation ratio {quarter:.3} under eps halving, gresho div ratio {ratio:.3}"))
}

struct Margins {
    fluid: FluidParams,
    floor: f64,
    worst: f64,
}

impl Observer for Margins {
    fn step(&mut self, prev: &State, next: &State, info: &StepInfo) {
        let r = check_lambda_conditions(prev, next, info.lambda, &self.fluid, self.floor);
        self.worst = self.worst.min(r.worst_margin);
    }
}

fn caw_lambda_advisory(lambda: Option<f64>) -> Item {
    const NAME: &str = "lambda conditions (caw)";
    let caw = preset("caw").expect("caw preset exists");
    let mut s = match caw.setup(100, caw.default_eps) {
        Ok(s) => s,
        Err(e) => return failed(NAME, e),
    };
    if let Some(l) = lambda {
        s.params.lambda0 = l;
    }
    let lam = s.params.lambda0;
    let mut obs = Margins { fluid: s.fluid, floor: s.params.jump_floor, worst: f64::INFINITY };
    let outcome = Stepper::new(&s.grid, s.fluid, s.params).and_then(|st| run_with(&st, s.state, &mut [&mut obs]));
    let detail = match outcome {
        Ok(r) => format!("lambda = {lam}, worst margin {:.3e} over {} steps", obs.worst, r.steps),
        Err(e) => format!("lambda = {lam}, run stopped: {e}"),
    };
    Item { name: NAME, passed: obs.worst >= 0.0, advisory: true, detail }
}
