//! `apflow run`: one simulation with CSV output.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use apflow::diagnostics::{ap_indicators, energies, ke_balance_residual, renorm_residual, ApIndicators};
use apflow::operators::div_h;
use apflow::scheme::{run_with, FluidParams, Observer, State, StepInfo, Stepper};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const ENERGY_HEADER: &str = "t,dt,lambda,ke,pe,total,min_rho,div_u_l1";

/// What a finished run reports back.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub dir: PathBuf,
    pub steps: u64,
    pub final_time: f64,
    pub min_rho: f64,
    /// Largest `total_{n+1} - total_n` relative to the initial total.
    pub max_energy_increase: f64,
    pub lambda_range: Option<(f64, f64)>,
    pub ap: ApIndicators,
    pub identities: Option<IdentityMaxima>,
}

/// Largest relative residuals of the exact discrete balances over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IdentityMaxima {
    pub renorm_rho: f64,
    pub renorm_rho2: f64,
    pub renorm_potential: f64,
    pub kinetic: f64,
}

/// Streams energies and snapshots while the solver runs.
struct Recorder<'a> {
    fluid: FluidParams,
    dir: &'a Path,
    energies: BufWriter<File>,
    snapshot_every: u64,
    identities: Option<IdentityMaxima>,
    initial_total: f64,
    last_total: f64,
    max_increase: f64,
    error: Option<CliError>,
}

impl Recorder<'_> {
    fn record(&mut self, state: &State, info: Option<&StepInfo>) -> Result<()> {
        let mut e = energies(state, &self.fluid)?;
        if let Some(info) = info {
            e = e.with_step(info);
            self.max_increase = self.max_increase.max(e.total - self.last_total);
        } else {
            self.initial_total = e.total;
        }
        self.last_total = e.total;
        let row = [e.t, e.dt, e.lambda, e.ke, e.pe, e.total, e.min_rho, e.div_u_l1].map(|v| format!("{v:?}")).join(",");
        writeln!(self.energies, "{row}").map_err(|err| CliError::io(self.dir.join("energies.csv"), err))?;
        if self.snapshot_every > 0 && state.n.is_multiple_of(self.snapshot_every) {
            write_fields(&self.dir.join(format!("fields_{}.csv", state.n)), state)?;
        }
        Ok(())
    }

    fn keep(&mut self, r: Result<()>) {
        if let (Err(e), None) = (r, &self.error) {
            self.error = Some(e);
        }
    }
}

impl Observer for Recorder<'_> {
    fn start(&mut self, state: &State) {
        let r = self.record(state, None);
        self.keep(r);
    }

    fn step(&mut self, prev: &State, next: &State, info: &StepInfo) {
        let r = self.record(next, Some(info));
        self.keep(r);
        if let Some(m) = self.identities.as_mut() {
            let f = self.fluid;
            let (lam, dt) = (info.lambda, info.dt);
            let rel = |b: fn(f64) -> f64, db: fn(f64) -> f64| renorm_residual(prev, next, lam, dt, b, db).relative();
            m.renorm_rho = m.renorm_rho.max(rel(|r| r, |_| 1.0));
            m.renorm_rho2 = m.renorm_rho2.max(rel(|r| r * r, |r| 2.0 * r));
            m.renorm_potential = m
                .renorm_potential
                .max(renorm_residual(prev, next, lam, dt, |r| f.potential(r), |r| f.potential_d1(r)).relative());
            m.kinetic = m.kinetic.max(ke_balance_residual(prev, next, lam, dt, &f).linear.relative());
        }
    }
}

/// `x[,y],rho,u1[,u2],div_u`, one row per cell in storage order.
pub fn write_fields(path: &Path, state: &State) -> Result<()> {
    let g = *state.rho.grid();
    let u = state.velocity();
    let div = div_h(&u);
    let mut out = String::new();
    out.push_str(if g.dim() == 1 { "x,rho,u1,div_u\n" } else { "x,y,rho,u1,u2,div_u\n" });
    for k in 0..g.cell_count() {
        let c = g.center(k);
        let uk = u.at(k);
        let cols: Vec<f64> = if g.dim() == 1 {
            vec![c[0], state.rho[k], uk[0], div[k]]
        } else {
            vec![c[0], c[1], state.rho[k], uk[0], uk[1], div[k]]
        };
        let row = cols.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",");
        out.push_str(&row);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn cmd_run(cfg: &RunConfig) -> Result<RunReport> {
    let setup = cfg.setup()?;
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let path = dir.join("energies.csv");
    let mut file = BufWriter::new(File::create(&path).map_err(|e| CliError::io(&path, e))?);
    writeln!(file, "{ENERGY_HEADER}").map_err(|e| CliError::io(&path, e))?;

    let stepper = Stepper::new(&setup.grid, setup.fluid, setup.params)?;
    let mut rec = Recorder {
        fluid: setup.fluid,
        dir: &dir,
        energies: file,
        snapshot_every: cfg.snapshot_every,
        identities: cfg.record_identities.then(IdentityMaxima::default),
        initial_total: 0.0,
        last_total: 0.0,
        max_increase: f64::NEG_INFINITY,
        error: None,
    };
    let outcome = run_with(&stepper, setup.state, &mut [&mut rec]);
    // Whatever was computed stays on disk, also when the run failed.
    rec.energies.flush().map_err(|e| CliError::io(&path, e))?;
    if let Some(e) = rec.error.take() {
        return Err(e);
    }
    let summary = outcome?;
    let last = &summary.final_state;
    if cfg.snapshot_every > 0 && !last.n.is_multiple_of(cfg.snapshot_every) {
        write_fields(&dir.join(format!("fields_{}.csv", last.n)), last)?;
    }

    let report = RunReport {
        dir: dir.clone(),
        steps: summary.steps,
        final_time: last.t,
        min_rho: summary.min_rho,
        max_energy_increase: if summary.steps == 0 { 0.0 } else { rec.max_increase / rec.initial_total.abs() },
        lambda_range: (summary.steps > 0).then_some((summary.lambda_min, summary.lambda_max)),
        ap: ap_indicators(last, &setup.fluid),
        identities: rec.identities,
    };
    let path = dir.join("summary.txt");
    fs::write(&path, summary_text(cfg, &report)).map_err(|e| CliError::io(&path, e))?;
    Ok(report)
}

pub fn summary_text(cfg: &RunConfig, r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "problem = {}", cfg.problem.name);
    let _ = writeln!(s, "epsilon = {:?}", cfg.eps);
    let _ = writeln!(s, "n = {}", cfg.n);
    let _ = writeln!(s, "final_time = {:?}", r.final_time);
    let _ = writeln!(s, "steps = {}", r.steps);
    let _ = writeln!(s, "min_rho = {:?}", r.min_rho);
    let _ = writeln!(s, "max_energy_increase = {:?}", r.max_energy_increase);
    if let Some((lo, hi)) = r.lambda_range {
        let _ = writeln!(s, "lambda_min = {lo:?}");
        let _ = writeln!(s, "lambda_max = {hi:?}");
    }
    let _ = writeln!(s, "max_density_deviation = {:?}", r.ap.max_density_deviation);
    let _ = writeln!(s, "div_u_l1 = {:?}", r.ap.div_u_l1);
    let _ = writeln!(s, "div_u_l1_over_eps2 = {:?}", r.ap.div_u_l1_over_eps2);
    if let Some(m) = r.identities {
        let _ = writeln!(s, "identity_renorm_rho = {:?}", m.renorm_rho);
        let _ = writeln!(s, "identity_renorm_rho2 = {:?}", m.renorm_rho2);
        let _ = writeln!(s, "identity_renorm_potential = {:?}", m.renorm_potential);
        let _ = writeln!(s, "identity_kinetic = {:?}", m.kinetic);
    }
    s
}
