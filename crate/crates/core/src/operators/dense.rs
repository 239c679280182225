//! Explicit matrices of the stencil operators, used as test oracles on small grids.

use super::{div_h, grad_h, lap_compact, lap_wide, partial, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Largest grid (in cells) for which [`dense_matrix`] will assemble a matrix.
pub const DENSE_CELL_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `div_h`, mapping `d·N` vector unknowns (component-major) to `N` cells.
    Div,
    /// `grad_h`, mapping `N` cells to `d·N` vector unknowns.
    Grad,
    /// Central difference `D_i` along one axis.
    Derivative(usize),
    LapCompact,
    LapWide,
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + alpha * b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && self.max_abs_diff(&self.transpose()) <= tol
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && self.add_scaled(1.0, &self.transpose()).max_abs() <= tol
    }

    /// True when each row is the previous one shifted right by one (1D circulant).
    pub fn is_circulant(&self, tol: f64) -> bool {
        let n = self.rows;
        self.rows == self.cols
            && (0..n).all(|i| (0..n).all(|j| (self[(i, j)] - self[(0, (j + n - i) % n)]).abs() <= tol))
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Numerical rank by Gaussian elimination with full pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let mut rank = 0;
        let mut used_col = vec![false; n];
        for _ in 0..m.min(n) {
            let mut best = (0.0, 0, 0);
            for i in rank..m {
                for j in 0..n {
                    if !used_col[j] && a[(i, j)].abs() > best.0 {
                        best = (a[(i, j)].abs(), i, j);
                    }
                }
            }
            if best.0 <= tol * scale {
                break;
            }
            let (_, pi, pj) = best;
            a.swap_rows(rank, pi);
            used_col[pj] = true;
            let p = a[(rank, pj)];
            for i in 0..m {
                if i != rank {
                    let f = a[(i, pj)] / p;
                    if f != 0.0 {
                        for j in 0..n {
                            let v = a[(rank, j)];
                            a[(i, j)] -= f * v;
                        }
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// LU factorisation with partial pivoting; `None` if singular.
    pub fn lu(&self) -> Option<Lu> {
        assert_eq!(self.rows, self.cols, "LU needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (piv, val) =
                (col..n)
                    .map(|i| (i, a[(i, col)].abs()))
                    .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if val == 0.0 {
                return None;
            }
            a.swap_rows(col, piv);
            perm.swap(col, piv);
            let p = a[(col, col)];
            for i in col + 1..n {
                let f = a[(i, col)] / p;
                a[(i, col)] = f;
                for j in col + 1..n {
                    let v = a[(col, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        Some(Lu { factors: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        self.lu().map(|lu| lu.solve(b))
    }

    /// `self^{-1} * rhs` column by column.
    pub fn solve_matrix(&self, rhs: &Self) -> Option<Self> {
        let lu = self.lu()?;
        let mut out = Self::zeros(rhs.rows, rhs.cols);
        for j in 0..rhs.cols {
            let col: Vec<f64> = (0..rhs.rows).map(|i| rhs[(i, j)]).collect();
            for (i, v) in lu.solve(&col).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Some(out)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Packed LU factors with the row permutation.
#[derive(Debug, Clone)]
pub struct Lu {
    factors: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let a = &self.factors;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| a[(i, j)] * y[j]).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[(i, j)] * y[j]).sum();
            y[i] = (y[i] - s) / a[(i, i)];
        }
        y
    }
}

/// Assembles the matrix of an operator by applying it to indicator fields.
pub fn dense_matrix(kind: OperatorKind, grid: &Grid) -> Result<DenseMatrix> {
    let n = grid.cell_count();
    if n > DENSE_CELL_CAP {
        return Err(Error::TooLarge { cells: n, cap: DENSE_CELL_CAP });
    }
    let d = grid.dim();
    let indicator = |j: usize| {
        let mut e = ScalarField::zeros(grid);
        e[j] = 1.0;
        e
    };
    let scalar_to_scalar = |op: &dyn Fn(&ScalarField) -> ScalarField| {
        let mut m = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let col = op(&indicator(j));
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    };
    let m = match kind {
        OperatorKind::LapCompact => scalar_to_scalar(&lap_compact),
        OperatorKind::LapWide => scalar_to_scalar(&lap_wide),
        OperatorKind::Derivative(axis) => {
            if axis >= d {
                return Err(Error::InvalidParameter(format!("axis {axis} on a {d}D grid")));
            }
            scalar_to_scalar(&|f| partial(f, axis))
        }
        OperatorKind::Grad => {
            let mut m = DenseMatrix::zeros(d * n, n);
            for j in 0..n {
                let g = grad_h(&indicator(j));
                for (axis, c) in g.comps().iter().enumerate() {
                    for i in 0..n {
                        m[(axis * n + i, j)] = c[i];
                    }
                }
            }
            m
        }
        OperatorKind::Div => {
            let mut m = DenseMatrix::zeros(n, d * n);
            for axis in 0..d {
                for j in 0..n {
                    let mut v = VectorField::zeros(grid);
                    v.comp_mut(axis)[j] = 1.0;
                    let col = div_h(&v);
                    for i in 0..n {
                        m[(i, axis * n + j)] = col[i];
                    }
                }
            }
            m
        }
    };
    Ok(m)
}
