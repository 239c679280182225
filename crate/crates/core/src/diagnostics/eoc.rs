use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operators::{ScalarField, VectorField};

/// One line of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EocRow {
    pub n: usize,
    pub h: f64,
    pub err_l2: f64,
    /// `None` for the first row.
    pub eoc: Option<f64>,
}

/// Block average of `fine` onto `coarse`.
pub fn restrict(fine: &ScalarField, coarse: &Grid) -> Result<ScalarField> {
    let fg = fine.grid();
    if fg.dim() != coarse.dim() || fg.origin() != coarse.origin() || fg.length() != coarse.length() {
        return Err(Error::GridMismatch);
    }
    let mut ratio = [1usize; 2];
    for (axis, r) in ratio.iter_mut().enumerate().take(fg.dim()) {
        let (nf, nc) = (fg.n(axis), coarse.n(axis));
        if nf % nc != 0 {
            return Err(Error::NonNestedGrids { axis, fine: nf, coarse: nc });
        }
        *r = nf / nc;
    }
    let weight = 1.0 / (ratio[0] * ratio[1]) as f64;
    let mut out = ScalarField::zeros(coarse);
    for k in 0..fg.cell_count() {
        let [i0, i1] = fg.multi_index(k);
        out[coarse.flat_index(i0 / ratio[0], i1 / ratio[1])] += fine[k];
    }
    Ok(out.map(|v| v * weight))
}

/// `sqrt(Σ|K| (coarse - R fine)²)` with `R` the block average.
pub fn l2_error(coarse: &ScalarField, fine: &ScalarField) -> Result<f64> {
    let r = restrict(fine, coarse.grid())?;
    let d = coarse.add_scaled(-1.0, &r);
    Ok(d.inner(&d).sqrt())
}

/// Vector version of [`l2_error`], summing the squares over components.
pub fn l2_error_vec(coarse: &VectorField, fine: &VectorField) -> Result<f64> {
    let mut acc = 0.0;
    for (c, f) in coarse.comps().iter().zip(fine.comps()) {
        let e = l2_error(c, f)?;
        acc += e * e;
    }
    Ok(acc.sqrt())
}

/// Rows from `(n, h, err)` triples; row `k` gets `log(e_{k-1}/e_k) / log(h_{k-1}/h_k)`.
pub fn eoc_table(entries: &[(usize, f64, f64)]) -> Vec<EocRow> {
    entries
        .iter()
        .enumerate()
        .map(|(i, &(n, h, err))| {
            let eoc = (i > 0).then(|| {
                let (_, hp, ep) = entries[i - 1];
                (ep / err).ln() / (hp / h).ln()
            });
            EocRow { n, h, err_l2: err, eoc }
        })
        .collect()
}
