use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
    #[error("cells are not square: h = {h0} along axis 0 but {h1} along axis 1")]
    NonSquareCells { h0: f64, h1: f64 },
    #[error("axis {axis} has {n} cells; at least 4 are required")]
    TooFewCells { axis: usize, n: usize },
    #[error("axis {axis} has non-positive length {length}")]
    NonPositiveLength { axis: usize, length: f64 },
    #[error("dense matrix requested for {cells} cells (cap is {cap})")]
    TooLarge { cells: usize, cap: usize },
    #[error("density must be positive, got {0}")]
    NonPositiveDensity(f64),
    #[error("density lost positivity at cell {cell} in step {step} (value {value})")]
    PositivityLost { cell: usize, step: u64, value: f64 },
    #[error("step limit of {max_steps} reached at t = {t} before t_end = {t_end}")]
    StepLimitExceeded { max_steps: u64, t: f64, t_end: f64 },
    #[error("projection check needs epsilon <= 1e-4, got {0}")]
    EpsilonTooLarge(f64),
    #[error("problem '{problem}' needs a {expected}D grid, got {actual}D")]
    WrongDimension { problem: &'static str, expected: usize, actual: usize },
    #[error("grid with {fine} cells cannot be restricted onto {coarse} cells along axis {axis}")]
    NonNestedGrids { axis: usize, fine: usize, coarse: usize },
    #[error("grids do not match")]
    GridMismatch,
    #[error("spectral solve left an imaginary residue {residue:e} (tolerance {tolerance:e})")]
    ImaginaryResidue { residue: f64, tolerance: f64 },
    #[error("unknown problem '{0}'")]
    UnknownProblem(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
