use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apflow_cli::{cmd_converge, cmd_run, cmd_validate, parse_config, CliError, RunConfig, ValidateOptions};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "apflow", version, about = "Low-Mach barotropic Euler solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write energies, snapshots and a summary.
    Run { config: PathBuf },
    /// Convergence study against a fine reference grid.
    Converge {
        config: PathBuf,
        /// Coarse grid sizes.
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        /// Reference grid size; must be a multiple of every coarse size.
        #[arg(long = "ref")]
        reference: usize,
    },
    /// Self-checks of operators, solver and scheme.
    Validate {
        /// λ used for the acoustic-wave λ-condition advisory.
        #[arg(long)]
        caw_lambda: Option<f64>,
        #[arg(long, hide = true)]
        corrupt_plan: bool,
    },
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_config(&text)?)
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config } => {
            let cfg = load(&config)?;
            let r = cmd_run(&cfg)?;
            println!(
                "{}: {} steps to t = {:?}, min rho {:?}, max energy increase {:?}, output in {}",
                cfg.problem.name,
                r.steps,
                r.final_time,
                r.min_rho,
                r.max_energy_increase,
                r.dir.display()
            );
        }
        Command::Converge { config, n_list, reference } => {
            let cfg = load(&config)?;
            let r = cmd_converge(&cfg, &n_list, reference)?;
            println!("n,err_rho,eoc_rho,err_u,eoc_u");
            for (a, b) in r.rho.iter().zip(&r.u) {
                let eoc = |e: Option<f64>| e.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
                println!("{},{:.4e},{},{:.4e},{}", a.n, a.err_l2, eoc(a.eoc), b.err_l2, eoc(b.eoc));
            }
        }
        Command::Validate { caw_lambda, corrupt_plan } => {
            let report = cmd_validate(&ValidateOptions { caw_lambda, corrupt_plan });
            for item in &report.items {
                println!("{item}");
            }
            let failures = report.failures();
            if failures > 0 {
                return Err(CliError::ValidationFailed(failures));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
