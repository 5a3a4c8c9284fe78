use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::OrientedRect;
use crate::error::{Error, Result};
use crate::field::Point;

/// Square `n × n` grid of cells of side `spacing`, cell `(row, col)`
/// centered at `origin + ((col + ½)h, (row + ½)h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Point,
    pub spacing: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(origin: Point, spacing: f64, n: usize) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) || n == 0 {
            return Err(Error::Parameter(format!("grid needs positive spacing and size, got h = {spacing}, n = {n}")));
        }
        Ok(Self { origin, spacing, n })
    }

    /// Grid of `n × n` cells exactly tiling `[min, min + side]²`.
    pub fn covering(min: Point, side: f64, n: usize) -> Result<Self> {
        Self::new(min, side / n as f64, n)
    }

    pub fn cell_center(&self, row: usize, col: usize) -> Point {
        [self.origin[0] + (col as f64 + 0.5) * self.spacing, self.origin[1] + (row as f64 + 0.5) * self.spacing]
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn side(&self) -> f64 {
        self.spacing * self.n as f64
    }

    pub fn max(&self) -> Point {
        [self.origin[0] + self.side(), self.origin[1] + self.side()]
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.n + col
    }

    pub fn row_col(&self, index: usize) -> (usize, usize) {
        (index / self.n, index % self.n)
    }

    /// Cell containing `p`, if inside the grid.
    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        let c = ((p[0] - self.origin[0]) / self.spacing).floor();
        let r = ((p[1] - self.origin[1]) / self.spacing).floor();
        let n = self.n as f64;
        (c >= 0.0 && r >= 0.0 && c < n && r < n).then(|| (r as usize, c as usize))
    }
}

/// Set of grid cells stored as a bitset.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterMask {
    grid: GridSpec,
    bits: Vec<u64>,
}

impl RasterMask {
    pub fn empty(grid: GridSpec) -> Self {
        Self { grid, bits: vec![0; grid.len().div_ceil(64)] }
    }

    pub fn full(grid: GridSpec) -> Self {
        let mut m = Self::empty(grid);
        for i in 0..grid.len() {
            m.insert_index(i);
        }
        m
    }

    pub fn from_indices(grid: GridSpec, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::empty(grid);
        for i in indices {
            m.insert_index(i);
        }
        m
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.contains_index(self.grid.index(row, col))
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, row: usize, col: usize) {
        self.insert_index(self.grid.index(row, col));
    }

    pub fn insert_index(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// `count · h²`
    pub fn measure(&self) -> f64 {
        self.count() as f64 * self.grid.cell_area()
    }

    /// Cell indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(k, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.indices().map(|i| self.grid.row_col(i))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        self.check(other)?;
        Ok(Self { grid: self.grid, bits: self.bits.iter().zip(&other.bits).map(|(a, b)| f(*a, *b)).collect() })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn union_with(&mut self, other: &Self) -> Result<()> {
        self.check(other)?;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0))
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0))
    }

    /// First shared cell in row-major order.
    pub fn first_common(&self, other: &Self) -> Result<Option<usize>> {
        self.check(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .enumerate()
            .find(|(_, (a, b))| *a & *b != 0)
            .map(|(k, (a, b))| k * 64 + (a & b).trailing_zeros() as usize))
    }

    /// Writes the grid header followed by one `row,col` line per member cell.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
        out.write_record(["origin_x", "origin_y", "spacing", "n"])?;
        let g = &self.grid;
        out.write_record([g.origin[0].to_string(), g.origin[1].to_string(), g.spacing.to_string(), g.n.to_string()])?;
        out.write_record(["row", "col"])?;
        for (r, c) in self.cells() {
            out.write_record([r.to_string(), c.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(r);
        let mut records = rdr.records();
        let mut next = || -> Result<csv::StringRecord> {
            records.next().ok_or_else(|| Error::Format("truncated mask file".into()))?.map_err(Error::from)
        };
        let header = next()?;
        if header.iter().collect::<Vec<_>>() != ["origin_x", "origin_y", "spacing", "n"] {
            return Err(Error::Format("missing grid header".into()));
        }
        let spec = next()?;
        let num = |i: usize| -> Result<f64> {
            spec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Format("bad grid header value".into()))
        };
        let n = spec.get(3).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Format("bad grid size".into()))?;
        let grid = GridSpec::new([num(0)?, num(1)?], num(2)?, n)?;
        if next()?.iter().collect::<Vec<_>>() != ["row", "col"] {
            return Err(Error::Format("missing row,col header".into()));
        }
        let mut mask = Self::empty(grid);
        for rec in records {
            let rec = rec?;
            let parse = |i: usize| -> Result<usize> {
                rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Format(format!("bad cell record {rec:?}")))
            };
            let (r, c) = (parse(0)?, parse(1)?);
            if r >= n || c >= n {
                return Err(Error::Format(format!("cell ({r}, {c}) outside {n}×{n} grid")));
            }
            mask.insert(r, c);
        }
        Ok(mask)
    }
}

/// Cells whose centers lie in the closed rectangle.
pub fn rasterize(rect: &OrientedRect, grid: &GridSpec) -> RasterMask {
    let indices = raster_indices(rect, grid);
    RasterMask::from_indices(*grid, indices)
}

/// Row-major indices of the cells whose centers lie in the closed rectangle.
pub fn raster_indices(rect: &OrientedRect, grid: &GridSpec) -> Vec<usize> {
    let (lo, hi) = rect.bounding_box();
    let h = grid.spacing;
    let n = grid.n as isize;
    let row_of = |y: f64| ((y - grid.origin[1]) / h - 0.5).floor() as isize;
    let r0 = (row_of(lo[1]) - 1).clamp(0, n) as usize;
    let r1 = (row_of(hi[1]) + 2).clamp(0, n) as usize;
    let (u, nv) = (rect.axis(), rect.normal());
    let rows: Vec<Vec<usize>> = (r0..r1)
        .into_par_iter()
        .map(|row| {
            let y = grid.origin[1] + (row as f64 + 0.5) * h;
            let dy = y - rect.center[1];
            // x-range where |s| ≤ L/2 and |r| ≤ W/2 on this horizontal line
            let mut xlo = f64::NEG_INFINITY;
            let mut xhi = f64::INFINITY;
            for (coef, off, half) in [(u[0], dy * u[1], rect.length / 2.0), (nv[0], dy * nv[1], rect.width / 2.0)] {
                if coef.abs() < 1e-15 {
                    if off.abs() > half + 1e-12 * half {
                        return Vec::new();
                    }
                } else {
                    let a = (-half - off) / coef;
                    let b = (half - off) / coef;
                    xlo = xlo.max(a.min(b));
                    xhi = xhi.min(a.max(b));
                }
            }
            if !(xlo.is_finite() && xhi.is_finite()) || xlo > xhi + 2.0 * h {
                return Vec::new();
            }
            let col_of = |x: f64| ((x + rect.center[0] - grid.origin[0]) / h - 0.5).floor() as isize;
            let c0 = (col_of(xlo) - 1).clamp(0, n) as usize;
            let c1 = (col_of(xhi) + 2).clamp(0, n) as usize;
            (c0..c1).filter(|&col| rect.contains_point(grid.cell_center(row, col))).map(|col| grid.index(row, col)).collect()
        })
        .collect();
    rows.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_grid(n: usize) -> GridSpec {
        GridSpec::covering([0.0, 0.0], 1.0, n).unwrap()
    }

    fn brute(rect: &OrientedRect, grid: &GridSpec) -> RasterMask {
        let mut m = RasterMask::empty(*grid);
        for r in 0..grid.n {
            for c in 0..grid.n {
                if rect.contains_point(grid.cell_center(r, c)) {
                    m.insert(r, c);
                }
            }
        }
        m
    }

    #[test]
    fn set_algebra() {
        let g = unit_grid(10);
        let a = RasterMask::from_indices(g, [0, 1, 2, 70]);
        let b = RasterMask::from_indices(g, [2, 3, 70, 99]);
        assert_eq!(a.union(&b).unwrap().count(), 6);
        assert_eq!(a.intersection(&b).unwrap().indices().collect::<Vec<_>>(), vec![2, 70]);
        assert_eq!(a.difference(&b).unwrap().indices().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(a.first_common(&b).unwrap(), Some(2));
        assert!(!a.is_disjoint(&b).unwrap());
        assert!(a.intersection(&b).unwrap().is_subset(&a).unwrap());
        let other = RasterMask::empty(unit_grid(11));
        assert!(matches!(a.union(&other), Err(Error::GridMismatch)));
        assert_eq!(RasterMask::full(g).count(), 100);
        assert!((RasterMask::full(g).measure() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let g = GridSpec::new([-0.5, 0.25], 0.125, 8).unwrap();
        let m = RasterMask::from_indices(g, [0, 9, 63]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(RasterMask::read_csv(buf.as_slice()).unwrap(), m);
        assert!(RasterMask::read_csv("row,col\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn rasterize_matches_brute_force() {
        let g = unit_grid(97);
        for k in 0..40 {
            let a = k as f64 * PI / 40.0;
            let r = OrientedRect::new([0.5 + 0.01 * k as f64, 0.45], a, 0.6, 0.05 + 0.01 * k as f64).unwrap();
            assert_eq!(rasterize(&r, &g), brute(&r, &g), "{r:?}");
        }
    }

    #[test]
    fn rectangle_through_cell_centers_is_closed() {
        let g = unit_grid(8);
        // sides pass exactly through the centers of columns 2..=5 and rows 2..=4
        let r = OrientedRect::new([0.5, 0.4375], 0.0, 0.375, 0.25).unwrap();
        assert_eq!(rasterize(&r, &g).count(), 12);
    }

    proptest! {
        #[test]
        fn raster_measure_within_perimeter_bound(
            cx in 0.3f64..0.7, cy in 0.3f64..0.7, a in 0.0f64..PI, l in 0.02f64..0.5, e in 0.02f64..1.0, n in 32usize..200,
        ) {
            let g = unit_grid(n);
            let r = OrientedRect::new([cx, cy], a, l, l * e).unwrap();
            let m = rasterize(&r, &g);
            let h = g.spacing;
            prop_assert!((m.measure() - r.area()).abs() <= 4.0 * h * (r.length + r.width));
            prop_assert_eq!(m, brute(&r, &g));
        }
    }
}
