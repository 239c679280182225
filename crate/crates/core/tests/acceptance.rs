//! Acceptance criteria. Every test prints one `criterion N: PASS|FAIL` line.

use std::f64::consts::PI;

use apflow::benchmarks::{preset, Setup, PRESETS};
use apflow::diagnostics::{
    ap_indicators, energies, eoc_table, ke_balance_residual, l2_error, l2_error_vec, renorm_residual,
};
use apflow::operators::{dense_matrix, DenseMatrix, OperatorKind};
use apflow::scheme::{run, run_with, Observer, StepInfo, Stepper};
use apflow::spectral::{build_symbols, projector_limit_check, SpectralSolver};
use apflow::{FluidParams, Grid, ScalarField, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, ok: bool, detail: &str) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

/// Records the total energy at every level.
struct EnergyLog {
    fluid: FluidParams,
    totals: Vec<f64>,
    min_rho: f64,
}

impl EnergyLog {
    fn new(fluid: FluidParams) -> Self {
        Self { fluid, totals: Vec::new(), min_rho: f64::INFINITY }
    }

    /// Largest relative increase between consecutive levels.
    fn worst_increase(&self) -> f64 {
        self.totals.windows(2).map(|w| (w[1] - w[0]) / w[0].abs()).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Observer for EnergyLog {
    fn start(&mut self, s: &State) {
        self.totals.push(energies(s, &self.fluid).unwrap().total);
        self.min_rho = self.min_rho.min(s.rho.min());
    }
    fn step(&mut self, _: &State, next: &State, _: &StepInfo) {
        self.totals.push(energies(next, &self.fluid).unwrap().total);
        self.min_rho = self.min_rho.min(next.rho.min());
    }
}

fn run_setup(s: &Setup) -> apflow::Result<apflow::scheme::RunSummary> {
    run(s.state.clone(), &s.params, &s.fluid, &s.grid, &mut [])
}

#[test]
fn criterion_1_energy_monotone() {
    let spp = preset("spp").unwrap();
    let mut details = Vec::new();
    let mut ok = true;
    for eps in [0.5, 0.1, 0.01] {
        let setup = spp.setup(50, eps).unwrap().with_t_end(0.5);
        let mut log = EnergyLog::new(setup.fluid);
        run(setup.state.clone(), &setup.params, &setup.fluid, &setup.grid, &mut [&mut log]).unwrap();
        let worst = log.worst_increase();
        ok &= worst <= 1e-10;
        details.push(format!("eps={eps}: steps={} max rel increase={worst:.3e}", log.totals.len() - 1));
    }
    report(1, ok, &details.join("; "));
}

#[test]
fn criterion_2_positivity() {
    let mut details = Vec::new();
    let mut ok = true;
    for p in PRESETS {
        let n = if p.dim == 1 { 1000 } else { 100 };
        for &eps in p.eps_list {
            if p.name == "gresho-contour" {
                continue;
            }
            let setup = p.setup(n, eps).unwrap();
            match run_setup(&setup) {
                Ok(s) => {
                    ok &= s.min_rho > 0.0;
                    details.push(format!("{} eps={eps} n={n}: min rho {:.6}", p.name, s.min_rho));
                }
                Err(e) => {
                    ok = false;
                    details.push(format!("{} eps={eps} n={n}: {e}", p.name));
                }
            }
        }
    }
    // Adaptive-λ runs of the two vortex problems on the convergence-study grid.
    for name in ["gresho", "vortex"] {
        let p = preset(name).unwrap();
        for &eps in p.eps_list {
            let setup = p.setup(50, eps).unwrap().with_adaptive_lambda();
            match run_setup(&setup) {
                Ok(s) => {
                    ok &= s.min_rho > 0.0;
                    details.push(format!("{name} adaptive eps={eps}: min rho {:.6}", s.min_rho));
                }
                Err(e) => {
                    ok = false;
                    details.push(format!("{name} adaptive eps={eps}: {e}"));
                }
            }
        }
    }
    report(2, ok, &details.join("; "));
}

/// Returns `(rho eoc, u eoc, rho errors at 250 and 500)`.
fn spp_eoc(eps: f64) -> (f64, f64, [f64; 2]) {
    let spp = preset("spp").unwrap();
    let final_state = |n: usize| {
        let s = spp.setup(n, eps).unwrap().with_t_end(0.1);
        run_setup(&s).unwrap().final_state
    };
    let reference = final_state(1000);
    let (mut rho_rows, mut u_rows) = (Vec::new(), Vec::new());
    for n in [250, 500] {
        let s = final_state(n);
        let h = 1.0 / n as f64;
        rho_rows.push((n, h, l2_error(&s.rho, &reference.rho).unwrap()));
        u_rows.push((n, h, l2_error_vec(&s.velocity(), &reference.velocity()).unwrap()));
    }
    let errs = [rho_rows[0].2, rho_rows[1].2];
    (eoc_table(&rho_rows)[1].eoc.unwrap(), eoc_table(&u_rows)[1].eoc.unwrap(), errs)
}

#[test]
fn criterion_3_eoc() {
    let (rho_05, u_05, e05) = spp_eoc(0.5);
    let (rho_01, _, _) = spp_eoc(0.1);
    let ok = (rho_05 - 2.1766).abs() <= 0.3 && (rho_01 - 1.2346).abs() <= 0.3 && (u_05 - 1.7296).abs() <= 0.3;
    report(
        3,
        ok,
        &format!("rho eoc eps=0.5: {rho_05:.4} (2.1766), rho eoc eps=0.1: {rho_01:.4} (1.2346), u eoc eps=0.5: {u_05:.4} (1.7296); \
             rho errors eps=0.5: {:.3e}, {:.3e} (0.00746, 0.00165)",
            e05[0], e05[1]
        ),
    );
}

#[test]
fn criterion_4_ap_indicators() {
    let gresho = preset("gresho").unwrap();
    let div = |eps: f64| {
        let s = gresho.setup(100, eps).unwrap();
        let fluid = s.fluid;
        ap_indicators(&run_setup(&s).unwrap().final_state, &fluid).div_u_l1
    };
    let (d1, d2) = (div(0.1), div(0.01));
    let within = |x: f64, target: f64| x >= target / 2.0 && x <= target * 2.0;
    let ratio = d2 / d1;
    let ok = within(d1, 1.235e-4) && within(d2, 3.285e-5) && ratio <= 0.5;
    report(4, ok, &format!("div_u_l1 eps=0.1: {d1:.4e} (1.235e-4), eps=0.01: {d2:.4e} (3.285e-5), ratio {ratio:.3}"));
}

#[test]
fn criterion_5_spectral() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut symbols_ok = true;
    for trial in 0..50 {
        let grid = if trial % 2 == 0 {
            Grid::line(rng.random_range(4..=32), 0.0, rng.random_range(0.5..2.0)).unwrap()
        } else {
            let n = rng.random_range(4..=16);
            Grid::unit_square(n).unwrap()
        };
        let fluid =
            FluidParams::new(rng.random_range(0.5..2.0), rng.random_range(1.1..2.5), rng.random_range(0.01..1.0), 1.0)
                .unwrap();
        let dt = rng.random_range(0.05..1.0) * grid.h();
        let lambda = rng.random_range(0.0..2.0);
        let sym = build_symbols(&grid, dt, lambda, &fluid);
        symbols_ok &= sym.v().iter().all(|&v| v >= 1.0) && sym.s().iter().all(|&s| s >= 1.0);

        let n = grid.cell_count();
        let lc = dense_matrix(OperatorKind::LapCompact, &grid).unwrap();
        let lw = dense_matrix(OperatorKind::LapWide, &grid).unwrap();
        let helm = DenseMatrix::identity(n).add_scaled(-dt * lambda * grid.h(), &lc);
        let mass = helm.add_scaled(-(dt / fluid.eps).powi(2) * fluid.dp_ref(), &helm.solve_matrix(&lw).unwrap());

        let b = ScalarField::from_values(&grid, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let solver = SpectralSolver::new(&grid);
        for (x, dense) in [
            (solver.solve_helmholtz(&b, &sym).unwrap(), helm.solve(b.values()).unwrap()),
            (solver.solve_mass_operator(&b, &sym).unwrap(), mass.solve(b.values()).unwrap()),
        ] {
            let norm = dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = x.values().iter().zip(&dense).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            worst = worst.max(diff / norm);
        }
    }

    // Zero-mean data; odd N keeps the checkerboard mode out of the kernel of the wide Laplacian.
    let grid = Grid::line(31, 0.0, 1.0).unwrap();
    let b = ScalarField::from_fn(&grid, |x| (2.0 * PI * x[0]).sin() + 0.5 * (6.0 * PI * x[0]).cos());
    let fluid = |eps: f64| FluidParams::new(1.0, 2.0, eps, 1.0).unwrap();
    let dev = |eps: f64| projector_limit_check(&grid, 0.01, 1.0, &fluid(eps), &b).unwrap();
    let small = dev(1e-6);
    let ratio = dev(1e-5) / dev(5e-6);
    let ok = worst <= 1e-12 && symbols_ok && small <= 1e-8 * b.max_abs() && (ratio - 4.0).abs() < 0.05;
    report(
        5,
        ok,
        &format!("max rel diff {worst:.2e}, symbols >= 1: {symbols_ok}, deviation at 1e-6: {small:.2e}, halving ratio {ratio:.4}"),
    );
}

struct IdentityLog {
    fluid: FluidParams,
    worst: [f64; 4],
}

impl Observer for IdentityLog {
    fn step(&mut self, prev: &State, next: &State, info: &StepInfo) {
        let f = self.fluid;
        let (l, dt) = (info.lambda, info.dt);
        let r = [
            renorm_residual(prev, next, l, dt, |r| r, |_| 1.0).relative(),
            renorm_residual(prev, next, l, dt, |r| r * r, |r| 2.0 * r).relative(),
            renorm_residual(prev, next, l, dt, |r| f.potential(r), |r| f.potential_d1(r)).relative(),
            ke_balance_residual(prev, next, l, dt, &f).linear.relative(),
        ];
        for (w, x) in self.worst.iter_mut().zip(r) {
            *w = w.max(x);
        }
    }
}

#[test]
fn criterion_6_identities() {
    let spp = preset("spp").unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for eps in [0.5, 0.1, 0.01] {
        let s = spp.setup(16, eps).unwrap();
        let mut log = IdentityLog { fluid: s.fluid, worst: [0.0; 4] };
        let summary = run(s.state.clone(), &s.params, &s.fluid, &s.grid, &mut [&mut log]).unwrap();
        ok &= log.worst.iter().all(|&w| w <= 1e-9);
        details.push(format!(
            "eps={eps} ({} steps): B=rho {:.1e}, B=rho^2 {:.1e}, B=P {:.1e}, ke {:.1e}",
            summary.steps, log.worst[0], log.worst[1], log.worst[2], log.worst[3]
        ));
    }
    report(6, ok, &details.join("; "));
}

fn shifted(s: &State, grid: &Grid) -> State {
    let shift = |f: &ScalarField| {
        let mut out = f.clone();
        for k in 0..grid.cell_count() {
            let mut to = grid.neighbor(k, 0, 1);
            if grid.dim() == 2 {
                to = grid.neighbor(to, 1, 1);
            }
            out[to] = f[k];
        }
        out
    };
    State { t: s.t, n: s.n, rho: shift(&s.rho), m: s.m.map_components(shift) }
}

#[test]
fn criterion_7_conservation_and_symmetry() {
    let mut ok = true;
    let mut details = Vec::new();
    for (name, n) in [("spp", 50), ("riemann", 64), ("gresho", 32), ("vortex", 32)] {
        let mut s = preset(name).unwrap().setup(n, 0.1).unwrap();
        s.params.t_end = 1e9;
        let stepper = Stepper::new(&s.grid, s.fluid, s.params).unwrap();
        let mass0 = s.state.mass();
        let mut state = s.state.clone();
        let mut drift: f64 = 0.0;
        for _ in 0..100 {
            state = stepper.step(&state).unwrap().0;
            drift = drift.max((state.mass() - mass0).abs() / mass0);
        }
        ok &= drift <= 1e-12;

        let a = stepper.step(&s.state).unwrap().0;
        let b = stepper.step(&shifted(&s.state, &s.grid)).unwrap().0;
        let expect = shifted(&a, &s.grid);
        let bitwise = expect.rho.values().iter().zip(b.rho.values()).all(|(x, y)| x.to_bits() == y.to_bits())
            && expect
                .m
                .comps()
                .iter()
                .zip(b.m.comps())
                .all(|(x, y)| x.values().iter().zip(y.values()).all(|(p, q)| p.to_bits() == q.to_bits()));
        ok &= bitwise;
        details.push(format!("{name}: mass drift {drift:.1e}, shift-equivariant {bitwise}"));
    }
    report(7, ok, &details.join("; "));
}

#[test]
fn criterion_8_adaptive_lambda_range() {
    let s = preset("gresho").unwrap().setup(50, 0.1).unwrap().with_adaptive_lambda();
    assert_eq!(s.params.c, 100.0);
    let stepper = Stepper::new(&s.grid, s.fluid, s.params).unwrap();
    let summary = run_with(&stepper, s.state.clone(), &mut []).unwrap();
    let (lo, hi) = (summary.lambda_min, summary.lambda_max);
    let ok = lo >= 0.05 && hi <= 1.5;
    report(8, ok, &format!("lambda in [{lo:.4}, {hi:.4}] over {} steps (reported [0.0812, 1.0087])", summary.steps));
}
