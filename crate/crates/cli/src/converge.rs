//! `apflow converge`: errors against a fine reference and observed orders.

use std::fs;
use std::path::Path;

use apflow::diagnostics::{eoc_table, l2_error, l2_error_vec, EocRow};
use apflow::scheme::{run_with, State, Stepper};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeReport {
    pub rho: Vec<EocRow>,
    pub u: Vec<EocRow>,
}

fn final_state(cfg: &RunConfig, n: usize) -> Result<State> {
    let cfg = RunConfig { n, ..cfg.clone() };
    let setup = cfg.setup()?;
    let stepper = Stepper::new(&setup.grid, setup.fluid, setup.params)?;
    Ok(run_with(&stepper, setup.state, &mut [])?.final_state)
}

/// Runs `reference_n` and every size in `n_list` to the configured `t_end`.
///
/// Grid sizes are checked for nesting before anything is computed.
pub fn cmd_converge(cfg: &RunConfig, n_list: &[usize], reference_n: usize) -> Result<ConvergeReport> {
    for &n in n_list {
        if n == 0 || !reference_n.is_multiple_of(n) {
            return Err(apflow::Error::NonNestedGrids { axis: 0, fine: reference_n, coarse: n }.into());
        }
    }
    let mut sizes = n_list.to_vec();
    sizes.sort_unstable();
    sizes.dedup();

    let (reference, coarse) = std::thread::scope(|scope| {
        let reference = scope.spawn(|| final_state(cfg, reference_n));
        let coarse: Vec<_> = sizes.iter().map(|&n| scope.spawn(move || final_state(cfg, n))).collect();
        let join = |h: std::thread::ScopedJoinHandle<'_, Result<State>>| h.join().expect("solver thread panicked");
        (join(reference), coarse.into_iter().map(join).collect::<Vec<_>>())
    });
    let reference = reference?;
    let reference_u = reference.velocity();

    let (mut rho_rows, mut u_rows) = (Vec::new(), Vec::new());
    for (&n, state) in sizes.iter().zip(coarse) {
        let state = state?;
        let h = state.rho.grid().h();
        rho_rows.push((n, h, l2_error(&state.rho, &reference.rho)?));
        u_rows.push((n, h, l2_error_vec(&state.velocity(), &reference_u)?));
    }
    let report = ConvergeReport { rho: eoc_table(&rho_rows), u: eoc_table(&u_rows) };

    let dir = cfg.output_dir();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    write_table(&dir.join("eoc_rho.csv"), &report.rho)?;
    write_table(&dir.join("eoc_u.csv"), &report.u)?;
    Ok(report)
}

/// `n,h,err_l2,eoc` with an empty `eoc` in the first row.
pub fn write_table(path: &Path, rows: &[EocRow]) -> Result<()> {
    let mut out = String::from("n,h,err_l2,eoc\n");
    for r in rows {
        let eoc = r.eoc.map(|e| format!("{e:?}")).unwrap_or_default();
        out.push_str(&format!("{},{:?},{:?},{}\n", r.n, r.h, r.err_l2, eoc));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}
