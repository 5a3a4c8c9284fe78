use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{line_angle, raster_indices, rasterize, GridSpec, OrientedRect, RasterMask};
use crate::angular::angular_profile;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Point};

/// Rectangle centered at `x` of length `2ε|v(x)|` along `v(x)` and half-width
/// `δ = ε·sup w_x / |v(x)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BourgainRect {
    pub base: Point,
    pub eps: f64,
    pub direction: Point,
    pub length: f64,
    pub delta: f64,
    pub sup_w: f64,
    pub degenerate: bool,
}

impl BourgainRect {
    /// Oriented rectangle with `L = 2ε|v|` and `W = 2δ`; `None` when degenerate.
    pub fn rect(&self) -> Option<OrientedRect> {
        if self.degenerate {
            return None;
        }
        let alpha = self.direction[1].atan2(self.direction[0]);
        OrientedRect::new(self.base, alpha, self.length, 2.0 * self.delta).ok()
    }

    /// The doubled rectangle `R'`.
    pub fn doubled(&self) -> Option<OrientedRect> {
        self.rect().map(|r| r.dilate(2.0).expect("factor 2 is valid"))
    }
}

pub fn bourgain_rectangle(field: &FieldSpec, x: Point, eps: f64, n_t: usize) -> Result<BourgainRect> {
    let v = field.evaluate(x)?;
    let norm = v[0].hypot(v[1]);
    if norm == 0.0 {
        return Err(Error::UndefinedDirection(x));
    }
    let profile = angular_profile(field, x, eps, n_t)?;
    Ok(BourgainRect {
        base: x,
        eps,
        direction: [v[0] / norm, v[1] / norm],
        length: 2.0 * eps * norm,
        delta: eps * profile.sup_w / norm,
        sup_w: profile.sup_w,
        degenerate: profile.is_degenerate(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub mask: RasterMask,
    /// Cells of `R` where the field vanishes.
    pub zero_cells: usize,
}

/// `V(R)`: cells of `R` whose field direction makes a line angle below
/// `W/(2L)` with the long axis.
pub fn population(field: &FieldSpec, rect: &OrientedRect, grid: &GridSpec) -> Result<Population> {
    let ecc = rect.eccentricity();
    if !(ecc < 1.0) {
        return Err(Error::Parameter(format!("population needs W/L < 1, got {ecc}")));
    }
    let threshold = ecc / 2.0;
    let axis = rect.axis();
    let cells = raster_indices(rect, grid);
    let verdicts: Vec<Option<bool>> = cells
        .par_iter()
        .map(|&i| {
            let (r, c) = grid.row_col(i);
            let v = field.evaluate(grid.cell_center(r, c))?;
            Ok(if v == [0.0, 0.0] { None } else { Some(line_angle(v, axis) < threshold) })
        })
        .collect::<Result<_>>()?;
    let zero_cells = verdicts.iter().filter(|v| v.is_none()).count();
    let mask = RasterMask::from_indices(*grid, cells.iter().zip(&verdicts).filter(|(_, v)| **v == Some(true)).map(|(i, _)| *i));
    Ok(Population { mask, zero_cells })
}

/// Dyadic-width partition of grid cells by `δ(R_{x,ε}) ∈ [2^{-s-1}, 2^{-s})`.
#[derive(Debug, Clone)]
pub struct OmegaPartition {
    pub grid: GridSpec,
    pub eps: f64,
    pub bins: BTreeMap<i32, RasterMask>,
    /// Cells with `sup w = 0`.
    pub degenerate: RasterMask,
    /// Cells where the field vanishes.
    pub undefined: RasterMask,
    /// Bourgain rectangle of every cell center, row-major; `None` where undefined.
    pub rects: Vec<Option<BourgainRect>>,
}

/// Unique `s` with `2^{-s-1} ≤ δ < 2^{-s}`.
pub fn dyadic_bin(delta: f64) -> i32 {
    let mut s = (-delta.log2()).ceil() as i32 - 1;
    while delta >= (-s as f64).exp2() {
        s -= 1;
    }
    while delta < (-(s + 1) as f64).exp2() {
        s += 1;
    }
    s
}

pub fn omega_partition(field: &FieldSpec, eps: f64, grid: &GridSpec, n_t: usize) -> Result<OmegaPartition> {
    let rects: Vec<Option<BourgainRect>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (r, c) = grid.row_col(i);
            match bourgain_rectangle(field, grid.cell_center(r, c), eps, n_t) {
                Ok(b) => Ok(Some(b)),
                Err(Error::UndefinedDirection(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut bins: BTreeMap<i32, RasterMask> = BTreeMap::new();
    let mut degenerate = RasterMask::empty(*grid);
    let mut undefined = RasterMask::empty(*grid);
    for (i, b) in rects.iter().enumerate() {
        match b {
            None => undefined.insert_index(i),
            Some(b) if b.degenerate => degenerate.insert_index(i),
            Some(b) => bins.entry(dyadic_bin(b.delta)).or_insert_with(|| RasterMask::empty(*grid)).insert_index(i),
        }
    }
    Ok(OmegaPartition { grid: *grid, eps, bins, degenerate, undefined, rects })
}

/// `Ω'_{ε,s}`: union of the rasterized doubled rectangles over the cells of bin `s`.
pub fn omega_prime(partition: &OmegaPartition, s: i32) -> Result<RasterMask> {
    let bin = partition.bins.get(&s).ok_or_else(|| Error::Parameter(format!("no cells in bin s = {s}")))?;
    let members: Vec<usize> = bin.indices().collect();
    let parts: Vec<RasterMask> = members
        .par_iter()
        .map(|&i| {
            let doubled = partition.rects[i].and_then(|b| b.doubled()).expect("binned cells are non-degenerate");
            rasterize(&doubled, &partition.grid)
        })
        .collect();
    let mut out = RasterMask::empty(partition.grid);
    for p in &parts {
        out.union_with(p)?;
    }
    Ok(out)
}
