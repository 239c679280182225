//! Uniform periodic structured mesh in one or two dimensions.
//!
//! Cells are stored row-major with axis 0 fastest: cell `(i0, i1)` lives at
//! flat index `i0 + n0 * i1`. Every axis wraps periodically.

use crate::error::{Error, Result};

/// Relative tolerance used when checking that cells are square.
const SQUARE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: [usize; 2],
    origin: [f64; 2],
    length: [f64; 2],
    h: f64,
}

/// Sign of the outward normal `n_{σ,K}` along the face's axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Plus,
    Minus,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Plus => 1.0,
            Orientation::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Plus => Orientation::Minus,
            Orientation::Minus => Orientation::Plus,
        }
    }
}

/// A face seen from one of its two cells.
///
/// `cell` is the inner cell K, `axis` the face normal direction and
/// `orientation` the sign of `n_{σ,K}` along that axis. The outer cell L is
/// the neighbour across the face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceRef {
    pub cell: usize,
    pub axis: usize,
    pub orientation: Orientation,
}

impl Grid {
    /// Builds a grid from per-axis cell counts, lower bounds and extents.
    pub fn new(dim: usize, n_cells: &[usize], origin: &[f64], length: &[f64]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::BadDimension(dim));
        }
        if n_cells.len() != dim || origin.len() != dim || length.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "expected {dim} entries per axis list, got n={}, origin={}, length={}",
                n_cells.len(),
                origin.len(),
                length.len()
            )));
        }
        let mut n = [1usize; 2];
        let mut o = [0.0; 2];
        let mut l = [0.0; 2];
        for axis in 0..dim {
            if n_cells[axis] < 4 {
                return Err(Error::TooFewCells { axis, n: n_cells[axis] });
            }
            if !(length[axis] > 0.0) || !length[axis].is_finite() {
                return Err(Error::NonPositiveLength { axis, length: length[axis] });
            }
            n[axis] = n_cells[axis];
            o[axis] = origin[axis];
            l[axis] = length[axis];
        }
        let h = l[0] / n[0] as f64;
        if dim == 2 {
            let h1 = l[1] / n[1] as f64;
            if ((h - h1) / h).abs() > SQUARE_TOL {
                return Err(Error::NonSquareCells { h0: h, h1 });
            }
        }
        Ok(Self { dim, n, origin: o, length: l, h })
    }

    /// 1D grid with `n` cells on `[lo, hi]`.
    pub fn line(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(1, &[n], &[lo], &[hi - lo])
    }

    /// 2D grid with `n x n` cells on the unit square.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(2, &[n, n], &[0.0, 0.0], &[1.0, 1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Cell count along `axis` (1 for the unused axis of a 1D grid).
    pub fn n(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn shape(&self) -> [usize; 2] {
        self.n
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn length(&self) -> &[f64] {
        &self.length[..self.dim]
    }

    pub fn cell_count(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// `|K| = h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// `|σ| = h^(d-1)`.
    pub fn face_area(&self) -> f64 {
        self.h.powi(self.dim as i32 - 1)
    }

    pub fn domain_measure(&self) -> f64 {
        self.length[..self.dim].iter().product()
    }

    pub fn flat_index(&self, i0: usize, i1: usize) -> usize {
        i0 + self.n[0] * i1
    }

    pub fn multi_index(&self, k: usize) -> [usize; 2] {
        [k % self.n[0], k / self.n[0]]
    }

    /// Flat index of the cell `offset` steps away from `k` along `axis`, wrapping.
    #[inline]
    pub fn neighbor(&self, k: usize, axis: usize, offset: isize) -> usize {
        let [i0, i1] = self.multi_index(k);
        let n = self.n[axis] as isize;
        match axis {
            0 => {
                let j = (i0 as isize + offset).rem_euclid(n) as usize;
                self.flat_index(j, i1)
            }
            _ => {
                let j = (i1 as isize + offset).rem_euclid(n) as usize;
                self.flat_index(i0, j)
            }
        }
    }

    /// Cell centre for a (possibly out-of-range) multi-index; indices wrap.
    pub fn cell_center(&self, index: &[isize]) -> Vec<f64> {
        (0..self.dim)
            .map(|axis| {
                let i = index[axis].rem_euclid(self.n[axis] as isize) as f64;
                self.origin[axis] + (i + 0.5) * self.h
            })
            .collect()
    }

    /// Centre of the cell with flat index `k`; unused axes report 0.
    pub fn center(&self, k: usize) -> [f64; 2] {
        let idx = self.multi_index(k);
        let mut x = [0.0; 2];
        for axis in 0..self.dim {
            x[axis] = self.origin[axis] + (idx[axis] as f64 + 0.5) * self.h;
        }
        x
    }

    /// The outer cell L of a face.
    pub fn outer(&self, face: FaceRef) -> usize {
        let offset = match face.orientation {
            Orientation::Plus => 1,
            Orientation::Minus => -1,
        };
        self.neighbor(face.cell, face.axis, offset)
    }

    /// All faces of cell `k`, i.e. `E(K)`.
    pub fn faces_of(&self, k: usize) -> impl Iterator<Item = FaceRef> + '_ {
        (0..self.dim).flat_map(move |axis| {
            [Orientation::Plus, Orientation::Minus].into_iter().map(move |orientation| FaceRef {
                cell: k,
                axis,
                orientation,
            })
        })
    }

    /// Every face of the mesh exactly once, seen from the cell on its minus side.
    pub fn faces(&self) -> impl Iterator<Item = FaceRef> + '_ {
        (0..self.cell_count())
            .flat_map(move |cell| (0..self.dim).map(move |axis| FaceRef { cell, axis, orientation: Orientation::Plus }))
    }

    pub fn face_count(&self) -> usize {
        self.cell_count() * self.dim
    }

    /// Unit normal `n_{σ,K}` as a 2-vector.
    pub fn normal(&self, face: FaceRef) -> [f64; 2] {
        let mut n = [0.0; 2];
        n[face.axis] = face.orientation.sign();
        n
    }

    /// The same face seen from its outer cell.
    pub fn opposite(&self, face: FaceRef) -> FaceRef {
        FaceRef { cell: self.outer(face), axis: face.axis, orientation: face.orientation.flipped() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn builds_1d_grid() {
        let g = Grid::new(1, &[4], &[0.0], &[1.0]).unwrap();
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.cell_count(), 4);
        assert_eq!(g.cell_volume(), 0.25);
        assert_eq!(g.face_area(), 1.0);
    }

    #[test]
    fn builds_2d_grid() {
        let g = Grid::new(2, &[10, 10], &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((g.h() - 0.1).abs() < 1e-15);
        assert_eq!(g.cell_count(), 100);
    }

    #[test]
    fn rejects_anisotropic_cells() {
        let err = Grid::new(2, &[10, 20], &[0.0, 0.0], &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonSquareCells { .. }));
    }

    #[test]
    fn rejects_small_and_degenerate_grids() {
        assert!(matches!(Grid::line(3, 0.0, 1.0), Err(Error::TooFewCells { axis: 0, n: 3 })));
        assert!(matches!(Grid::line(8, 1.0, 1.0), Err(Error::NonPositiveLength { .. })));
        assert!(matches!(Grid::new(3, &[4, 4, 4], &[0.; 3], &[1.; 3]), Err(Error::BadDimension(3))));
    }

    #[test]
    fn cell_centers() {
        let g = Grid::line(4, 0.0, 1.0).unwrap();
        assert_eq!(g.cell_center(&[0]), vec![0.125]);
        assert_eq!(g.cell_center(&[3]), vec![0.875]);
        assert_eq!(g.cell_center(&[-1]), vec![0.875]);
        assert_eq!(g.cell_center(&[4]), vec![0.125]);

        // N = 2 violates the stencil-width minimum, so check the formula on N = 4 instead.
        let g2 = Grid::unit_square(4).unwrap();
        assert_eq!(g2.cell_center(&[1, 0]), vec![0.375, 0.125]);
        assert_eq!(g2.center(g2.flat_index(3, 2)), [0.875, 0.625]);
    }

    #[test]
    fn neighbors_wrap() {
        let g = Grid::new(2, &[4, 5], &[0.0, 0.0], &[0.8, 1.0]).unwrap();
        let k = g.flat_index(0, 4);
        assert_eq!(g.neighbor(k, 0, -1), g.flat_index(3, 4));
        assert_eq!(g.neighbor(k, 1, 1), g.flat_index(0, 0));
        assert_eq!(g.neighbor(k, 1, -2), g.flat_index(0, 2));
    }

    #[test]
    fn normals_of_a_cell_sum_to_zero() {
        for g in [Grid::line(6, 0.0, 1.0).unwrap(), Grid::unit_square(5).unwrap()] {
            for k in 0..g.cell_count() {
                let mut sum = [0.0; 2];
                for f in g.faces_of(k) {
                    let n = g.normal(f);
                    sum[0] += n[0];
                    sum[1] += n[1];
                }
                assert_eq!(sum, [0.0, 0.0]);
                assert_eq!(g.faces_of(k).count(), 2 * g.dim());
            }
        }
    }

    #[test]
    fn oriented_faces_cover_each_face_once() {
        let g = Grid::new(2, &[4, 6], &[0.0, 0.0], &[2.0, 3.0]).unwrap();
        let mut seen = HashSet::new();
        for f in g.faces() {
            let l = g.outer(f);
            let key = (f.axis, f.cell.min(l), f.cell.max(l));
            assert!(seen.insert(key));
            // Opposite view points the other way and comes back to the same cell.
            let back = g.opposite(f);
            assert_eq!(g.outer(back), f.cell);
            assert_eq!(g.normal(back)[f.axis], -g.normal(f)[f.axis]);
        }
        assert_eq!(seen.len(), g.face_count());
        // Every (cell, face) pair is reached from exactly one oriented face.
        let mut incidences = HashSet::new();
        for f in g.faces() {
            assert!(incidences.insert((f.cell, f.axis, 1)));
            assert!(incidences.insert((g.outer(f), f.axis, -1)));
        }
        assert_eq!(incidences.len(), 2 * g.face_count());
    }
}
