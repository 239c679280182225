use std::fs;
use std::path::Path;
use std::process::Command;

use apflow_cli::{cmd_converge, cmd_run, cmd_validate, parse_config, CliError, ValidateOptions};

fn config(text: &str, out: &Path) -> apflow_cli::RunConfig {
    let mut cfg = parse_config(text).unwrap();
    cfg.output = out.to_path_buf();
    cfg
}

fn rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn zero_length_run_writes_initial_row_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem = spp\nnx = 20\nt_end = 0\nsnapshot_every = 1", dir.path());
    let r = cmd_run(&cfg).unwrap();
    assert_eq!(r.steps, 0);
    let lines = rows(&dir.path().join("energies.csv"));
    assert_eq!(lines, vec!["t,dt,lambda,ke,pe,total,min_rho,div_u_l1".to_string(), lines[1].clone()]);
    assert!(lines[1].starts_with("0.0,0.0,0.0,"));
    assert_eq!(rows(&dir.path().join("fields_0.csv")).len(), 21);
    assert!(dir.path().join("summary.txt").exists());
}

#[test]
fn spp_run_is_energy_stable_and_reproducible() {
    let text = "problem = spp\nepsilon = 0.01\nnx = 50\ncfl = 0.1\nt_end = 0.05\nsnapshot_every = 100\nrecord_identities = true";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let r = cmd_run(&config(text, a.path())).unwrap();
    cmd_run(&config(text, b.path())).unwrap();

    assert!(r.max_energy_increase <= 1e-10, "energy grew by {}", r.max_energy_increase);
    let m = r.identities.unwrap();
    assert!(m.renorm_rho.max(m.renorm_rho2).max(m.renorm_potential).max(m.kinetic) <= 1e-9);
    assert_eq!(rows(&a.path().join("energies.csv")).len() as u64, r.steps + 2);

    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "fields_0.csv"));
    assert!(names.iter().any(|n| *n == *format!("fields_{}.csv", r.steps)));
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
    }
    let header = rows(&a.path().join("fields_0.csv"))[0].clone();
    assert_eq!(header, "x,rho,u1,div_u");
    let summary = fs::read_to_string(a.path().join("summary.txt")).unwrap();
    assert!(summary.contains("identity_kinetic = "));
    assert!(summary.contains(&format!("steps = {}", r.steps)));
}

#[test]
fn two_dimensional_snapshot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem = gresho\nnx = 10\nt_end = 0.05\nsnapshot_every = 1000", dir.path());
    let r = cmd_run(&cfg).unwrap();
    let last = rows(&dir.path().join(format!("fields_{}.csv", r.steps)));
    assert_eq!(last[0], "x,y,rho,u1,u2,div_u");
    assert_eq!(last.len(), 101);
}

#[test]
fn adaptive_run_reports_lambda_range() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem = gresho\nnx = 20\nt_end = 0.2\nlambda.mode = adaptive\nlambda.c = 100", dir.path());
    let r = cmd_run(&cfg).unwrap();
    let (lo, hi) = r.lambda_range.unwrap();
    assert!(0.0 < lo && lo <= hi);
    let lambdas: Vec<f64> = rows(&dir.path().join("energies.csv"))[2..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(lambdas.iter().all(|&l| (lo..=hi).contains(&l)));
}

#[test]
fn failed_run_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem = spp\nnx = 20\nmax_steps = 2", dir.path());
    let err = cmd_run(&cfg).unwrap_err();
    assert!(matches!(err, CliError::Solver(apflow::Error::StepLimitExceeded { max_steps: 2, .. })));
    assert_eq!(err.exit_code(), 3);
    assert_eq!(rows(&dir.path().join("energies.csv")).len(), 4);
}

#[test]
fn convergence_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem = spp\nepsilon = 0.1\nt_end = 0.1", dir.path());
    let r = cmd_converge(&cfg, &[500, 250], 1000).unwrap();
    assert_eq!(r.rho.iter().map(|row| row.n).collect::<Vec<_>>(), vec![250, 500]);
    assert!(r.rho[0].eoc.is_none());
    let u_eoc = r.u[1].eoc.unwrap();
    assert!((u_eoc - 1.1554).abs() <= 0.3, "u eoc {u_eoc}");

    let lines = rows(&dir.path().join("eoc_u.csv"));
    assert_eq!(lines[0], "n,h,err_l2,eoc");
    assert!(lines[1].ends_with(','));
    let last: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(last[0], "500");
    assert_eq!(last[3].parse::<f64>().unwrap(), u_eoc);
    assert_eq!(rows(&dir.path().join("eoc_rho.csv")).len(), 3);
}

#[test]
fn convergence_needs_nested_grids() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem = spp", dir.path());
    let err = cmd_converge(&cfg, &[3], 1000).unwrap_err();
    assert!(matches!(err, CliError::Solver(apflow::Error::NonNestedGrids { fine: 1000, coarse: 3, .. })));
    assert!(!dir.path().join("eoc_rho.csv").exists());
}

#[test]
fn validation_passes_and_detects_faults() {
    let report = cmd_validate(&ValidateOptions::default());
    assert_eq!(report.failures(), 0, "{report:#?}");

    let zero = cmd_validate(&ValidateOptions { caw_lambda: Some(0.0), ..Default::default() });
    let advisory = zero.item("lambda conditions (caw)").unwrap();
    assert!(advisory.advisory && !advisory.passed);
    assert_eq!(zero.failures(), 0);

    let broken = cmd_validate(&ValidateOptions { corrupt_plan: true, ..Default::default() });
    assert!(!broken.item("spectral vs dense").unwrap().passed);
    assert_eq!(broken.failures(), 1);
}

fn apflow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_apflow"))
}

#[test]
fn binary_exit_codes_and_output_override() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };

    let bad = write("bad.cfg", "problem = warp\n");
    let out = apflow().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let out_dir = dir.path().join("elsewhere");
    let good = write("good.cfg", "problem = spp\nnx = 20\nt_end = 0.05\noutput = ignored\n");
    let out = apflow().arg("run").arg(&good).current_dir(dir.path()).env("APFLOW_OUT", &out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("energies.csv").exists());
    assert!(!dir.path().join("ignored").exists());

    let limited = write("limited.cfg", "problem = spp\nnx = 20\nmax_steps = 1\n");
    let out = apflow().arg("run").arg(&limited).env("APFLOW_OUT", &out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = apflow().args(["converge", bad.to_str().unwrap(), "--n", "10", "--ref", "20"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = apflow().args(["validate", "--corrupt-plan"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL              spectral vs dense"));
}
