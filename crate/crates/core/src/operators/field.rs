use crate::error::{Error, Result};
use crate::grid::Grid;

/// Piecewise-constant scalar unknown, one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

/// Piecewise-constant vector unknown with one scalar field per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    comps: Vec<ScalarField>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self { grid: *grid, values: vec![value; grid.cell_count()] }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values for {} cells",
                values.len(),
                grid.cell_count()
            )));
        }
        Ok(Self { grid: *grid, values })
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.cell_count()).map(|k| f(grid.center(k))).collect();
        Self { grid: *grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Cellwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid, values }
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + alpha * b)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    /// `Σ_K |K| φ_K`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ_K |K| |φ_K|`.
    pub fn l1_norm(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// `(Σ_K |K| φ_K ψ_K)`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.grid.cell_volume() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.values[k]
    }
}

impl std::ops::IndexMut<usize> for ScalarField {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.values[k]
    }
}

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: *grid, comps: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect() }
    }

    pub fn from_components(grid: &Grid, comps: Vec<ScalarField>) -> Result<Self> {
        if comps.len() != grid.dim() || comps.iter().any(|c| c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid: *grid, comps })
    }

    /// Samples a vector-valued function at every cell centre.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let samples: Vec<[f64; 2]> = (0..grid.cell_count()).map(|k| f(grid.center(k))).collect();
        let comps = (0..grid.dim())
            .map(|i| {
                let values = samples.iter().map(|s| s[i]).collect();
                ScalarField { grid: *grid, values }
            })
            .collect();
        Self { grid: *grid, comps }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, axis: usize) -> &ScalarField {
        &self.comps[axis]
    }

    pub fn comp_mut(&mut self, axis: usize) -> &mut ScalarField {
        &mut self.comps[axis]
    }

    pub fn comps(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.comps
    }

    /// Value at cell `k` padded to two components.
    #[inline]
    pub fn at(&self, k: usize) -> [f64; 2] {
        let mut v = [0.0; 2];
        for (i, c) in self.comps.iter().enumerate() {
            v[i] = c[k];
        }
        v
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self { grid: self.grid, comps: self.comps.iter().map(f).collect() }
    }

    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.add_scaled(alpha, b)).collect();
        Self { grid: self.grid, comps }
    }

    /// Euclidean norm per cell.
    pub fn magnitude(&self) -> ScalarField {
        let values =
            (0..self.grid.cell_count()).map(|k| self.comps.iter().map(|c| c[k] * c[k]).sum::<f64>().sqrt()).collect();
        ScalarField { grid: self.grid, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    /// `Σ_K |K| φ_K · ψ_K`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.comps.iter().zip(&other.comps).map(|(a, b)| a.inner(b)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.is_finite())
    }
}
