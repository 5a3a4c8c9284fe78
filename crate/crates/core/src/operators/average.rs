use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GridFunction;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Point};
use crate::geometry::RasterMask;

/// `A_ε f(x) = (1/ε) ∫_{-ε}^{ε} f(x + t v(x)) dt` by the trapezoid rule on
/// `n_t` intervals, `f` bilinearly interpolated and zero outside its grid.
/// `A_ε 1 = 2`.
pub fn average_a(field: &FieldSpec, f: &GridFunction, x: Point, eps: f64, n_t: usize) -> Result<f64> {
    if !(eps > 0.0) || n_t < 2 {
        return Err(Error::Parameter(format!("need ε > 0 and N_t ≥ 2, got ε = {eps}, N_t = {n_t}")));
    }
    let v = field.evaluate(x)?;
    let h = 2.0 * eps / n_t as f64;
    let mut acc = 0.0;
    for i in 0..=n_t {
        let t = eps * (2.0 * i as f64 - n_t as f64) / n_t as f64;
        let weight = if i == 0 || i == n_t { h / 2.0 } else { h };
        acc += weight * f.sample([x[0] + t * v[0], x[1] + t * v[1]]);
    }
    Ok(acc / eps)
}

/// Scales `ε_k = 2^{-k} ε₀` for `k = 0..=k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicScales {
    pub eps0: f64,
    pub k_max: u32,
}

impl DyadicScales {
    pub fn scales(&self) -> Vec<f64> {
        (0..=self.k_max).map(|k| self.eps0 * (-(k as f64)).exp2()).collect()
    }
}

/// `M_v f = χ_Ω · max_k |A_{ε_k} f|` evaluated at the cell centers of `omega`.
pub fn maximal_mv(field: &FieldSpec, f: &GridFunction, scales: &[f64], omega: &RasterMask, n_t: usize) -> Result<GridFunction> {
    if scales.is_empty() {
        return Err(Error::Parameter("scale set is empty".into()));
    }
    if omega.grid() != &f.grid {
        return Err(Error::GridMismatch);
    }
    let cells: Vec<usize> = omega.indices().collect();
    let vals: Vec<f64> = cells
        .par_iter()
        .map(|&i| {
            let (r, c) = f.grid.row_col(i);
            let x = f.grid.cell_center(r, c);
            scales.iter().try_fold(0.0f64, |m, &e| Ok(m.max(average_a(field, f, x, e, n_t)?.abs())))
        })
        .collect::<Result<_>>()?;
    let mut out = GridFunction::zeros(f.grid);
    for (i, v) in cells.into_iter().zip(vals) {
        out.values[i] = v;
    }
    Ok(out)
}
