//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! problem = gresho
//! epsilon = 0.01
//! nx = 50
//! lambda.mode = adaptive
//! lambda.c = 200
//! ```
//!
//! Omitted keys take the preset's documented values.

use std::path::PathBuf;
use std::str::FromStr;

use apflow::benchmarks::{preset, ProblemPreset, Setup};
use apflow::scheme::{FluidParams, LambdaMode, SchemeParams};

use crate::error::ConfigError;

pub const KEYS: &[&str] = &[
    "problem",
    "epsilon",
    "nx",
    "ny",
    "kappa",
    "gamma",
    "rho0",
    "cfl",
    "lambda.mode",
    "lambda.value",
    "lambda.c",
    "t_end",
    "max_steps",
    "output",
    "snapshot_every",
    "record_identities",
    "jump_floor",
];

pub const DEFAULT_OUTPUT: &str = "apflow_out";
/// Environment variable that replaces the configured output directory.
pub const OUTPUT_ENV: &str = "APFLOW_OUT";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: &'static ProblemPreset,
    pub eps: f64,
    /// Cells per axis.
    pub n: usize,
    pub kappa: f64,
    pub gamma: f64,
    /// `None` linearises about the mean initial density.
    pub rho0: Option<f64>,
    pub cfl: f64,
    pub lambda_mode: LambdaMode,
    pub lambda0: f64,
    pub c: f64,
    pub t_end: f64,
    pub max_steps: u64,
    pub output: PathBuf,
    /// Write `fields_{step}.csv` every this many steps; 0 disables snapshots.
    pub snapshot_every: u64,
    pub record_identities: bool,
    pub jump_floor: f64,
}

impl RunConfig {
    /// Preset defaults for `problem` at its default Mach number.
    pub fn for_problem(problem: &'static ProblemPreset) -> Self {
        Self::with_eps(problem, problem.default_eps)
    }

    fn with_eps(problem: &'static ProblemPreset, eps: f64) -> Self {
        Self {
            problem,
            eps,
            n: problem.default_n,
            kappa: problem.kappa,
            gamma: problem.gamma,
            rho0: None,
            cfl: problem.cfl_for(eps),
            lambda_mode: LambdaMode::Constant,
            lambda0: problem.lambda0,
            c: problem.c_for(eps),
            t_end: problem.t_end,
            max_steps: u64::MAX,
            output: PathBuf::from(DEFAULT_OUTPUT),
            snapshot_every: 0,
            record_identities: false,
            jump_floor: SchemeParams::DEFAULT_JUMP_FLOOR,
        }
    }

    pub fn scheme_params(&self) -> SchemeParams {
        SchemeParams {
            cfl: self.cfl,
            lambda_mode: self.lambda_mode,
            lambda0: self.lambda0,
            c: self.c,
            t_end: self.t_end,
            max_steps: self.max_steps,
            jump_floor: self.jump_floor,
        }
    }

    pub fn setup(&self) -> apflow::Result<Setup> {
        let grid = self.problem.grid(self.n)?;
        let state = self.problem.initial_state(&grid, self.eps)?;
        let rho0 = self.rho0.unwrap_or_else(|| state.rho.mean());
        let fluid = FluidParams::new(self.kappa, self.gamma, self.eps, rho0)?;
        let params = self.scheme_params();
        params.validate()?;
        Ok(Setup { grid, fluid, params, state })
    }

    /// `APFLOW_OUT` if set, else the configured directory.
    pub fn output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_ENV).map(PathBuf::from).unwrap_or_else(|| self.output.clone())
    }
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn bad(&self, reason: impl Into<String>) -> ConfigError {
        ConfigError::BadValue {
            line: self.line,
            key: self.key.to_string(),
            value: self.value.to_string(),
            reason: reason.into(),
        }
    }

    fn parse<T: FromStr>(&self) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.value.parse().map_err(|e: T::Err| self.bad(e.to_string()))
    }

    fn number(&self, ok: impl Fn(f64) -> bool, rule: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.parse()?;
        if v.is_finite() && ok(v) {
            Ok(v)
        } else {
            Err(self.bad(rule))
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Syntax { line, text: raw.trim().to_string() });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { line, key: key.to_string() });
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(ConfigError::Duplicate { line, key: key.to_string() });
        }
        entries.push(Entry { line, key, value });
    }

    let find = |key: &str| entries.iter().find(|e| e.key == key);
    let problem_entry = find("problem").ok_or(ConfigError::MissingProblem)?;
    let problem = preset(problem_entry.value)
        .map_err(|_| ConfigError::UnknownProblem { line: problem_entry.line, name: problem_entry.value.to_string() })?;
    let eps = match find("epsilon") {
        Some(e) => e.number(|v| v > 0.0, "epsilon must be positive")?,
        None => problem.default_eps,
    };
    let mut cfg = RunConfig::with_eps(problem, eps);

    for e in &entries {
        match e.key {
            "problem" | "epsilon" => {}
            "nx" => cfg.n = cells(e)?,
            "ny" => {
                if problem.dim == 1 {
                    return Err(e.bad(format!("'{}' is one-dimensional", problem.name)));
                }
                let ny = cells(e)?;
                let nx = find("nx").map(cells).transpose()?.unwrap_or(cfg.n);
                if ny != nx {
                    return Err(e.bad(format!("cells must be square, so ny must equal nx = {nx}")));
                }
            }
            "kappa" => cfg.kappa = e.number(|v| v > 0.0, "kappa must be positive")?,
            "gamma" => cfg.gamma = e.number(|v| v > 1.0, "gamma must exceed 1")?,
            "rho0" => cfg.rho0 = Some(e.number(|v| v > 0.0, "rho0 must be positive")?),
            "cfl" => cfg.cfl = e.number(|v| v > 0.0, "cfl must be positive")?,
            "lambda.mode" => {
                cfg.lambda_mode = match e.value {
                    "constant" => LambdaMode::Constant,
                    "adaptive" => LambdaMode::Adaptive,
                    "bounds" => LambdaMode::Bounds,
                    _ => return Err(e.bad("expected constant, adaptive or bounds")),
                }
            }
            "lambda.value" => cfg.lambda0 = e.number(|v| v >= 0.0, "lambda must be non-negative")?,
            "lambda.c" => cfg.c = e.number(|v| v > 0.0, "c must be positive")?,
            "t_end" => cfg.t_end = e.number(|v| v >= 0.0, "t_end must be non-negative")?,
            "max_steps" => cfg.max_steps = e.parse()?,
            "output" => {
                if e.value.is_empty() {
                    return Err(e.bad("output directory must not be empty"));
                }
                cfg.output = PathBuf::from(e.value);
            }
            "snapshot_every" => cfg.snapshot_every = e.parse()?,
            "record_identities" => cfg.record_identities = e.parse()?,
            "jump_floor" => cfg.jump_floor = e.number(|v| v >= 0.0, "jump_floor must be non-negative")?,
            other => unreachable!("key {other} passed the key check"),
        }
    }
    Ok(cfg)
}

fn cells(e: &Entry) -> Result<usize, ConfigError> {
    let n: usize = e.parse()?;
    if n < 4 {
        return Err(e.bad("at least 4 cells are required"));
    }
    Ok(n)
}
