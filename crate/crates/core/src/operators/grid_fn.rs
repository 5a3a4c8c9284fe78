use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::field::Point;
use crate::geometry::{GridSpec, RasterMask};

const MAGIC: &[u8; 4] = b"VFGF";

/// Cell-centered samples on a square grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Parameter(format!("{} values for a {}×{} grid", values.len(), grid.n, grid.n)));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (r, c) = grid.row_col(i);
                f(grid.cell_center(r, c))
            })
            .collect();
        Self { grid, values }
    }

    pub fn indicator(mask: &RasterMask) -> Self {
        let mut f = Self::zeros(*mask.grid());
        for i in mask.indices() {
            f.values[i] = 1.0;
        }
        f
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.grid.index(row, col)]
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| g(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(&a, &b)| g(a, b)).collect() })
    }

    /// Bilinear interpolation between cell centers, with `f = 0` outside the grid.
    pub fn sample(&self, p: Point) -> f64 {
        let h = self.grid.spacing;
        let fx = (p[0] - self.grid.origin[0]) / h - 0.5;
        let fy = (p[1] - self.grid.origin[1]) / h - 0.5;
        if !(fx.is_finite() && fy.is_finite()) {
            return 0.0;
        }
        let (x0, y0) = (fx.floor(), fy.floor());
        let (ax, ay) = (fx - x0, fy - y0);
        let n = self.grid.n as f64;
        let at = |r: f64, c: f64| {
            if r < 0.0 || c < 0.0 || r >= n || c >= n {
                0.0
            } else {
                self.get(r as usize, c as usize)
            }
        };
        (1.0 - ay) * ((1.0 - ax) * at(y0, x0) + ax * at(y0, x0 + 1.0)) + ay * ((1.0 - ax) * at(y0 + 1.0, x0) + ax * at(y0 + 1.0, x0 + 1.0))
    }

    /// `h² Σ |f|`
    pub fn l1(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// `(h² Σ f²)^{1/2}`
    pub fn l2(&self) -> f64 {
        self.l2_squared().sqrt()
    }

    pub fn l2_squared(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mean of `|f|` over the cells of a nonempty mask.
    pub fn abs_mean_over(&self, cells: &[usize]) -> f64 {
        cells.iter().map(|&i| self.values[i].abs()).sum::<f64>() / cells.len() as f64
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
        out.write_record(["origin_x", "origin_y", "spacing", "n"])?;
        let g = &self.grid;
        out.write_record([g.origin[0].to_string(), g.origin[1].to_string(), g.spacing.to_string(), g.n.to_string()])?;
        out.write_record(["row", "col", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            let (r, c) = g.row_col(i);
            out.write_record([r.to_string(), c.to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(r);
        let mut records = rdr.records();
        let mut next = || -> Result<csv::StringRecord> {
            records.next().ok_or_else(|| Error::Format("truncated grid function file".into()))?.map_err(Error::from)
        };
        if next()?.iter().collect::<Vec<_>>() != ["origin_x", "origin_y", "spacing", "n"] {
            return Err(Error::Format("missing grid header".into()));
        }
        let spec = next()?;
        let num = |i: usize| -> Result<f64> {
            spec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Format("bad grid header value".into()))
        };
        let n: usize = spec.get(3).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Format("bad grid size".into()))?;
        let grid = GridSpec::new([num(0)?, num(1)?], num(2)?, n)?;
        if next()?.iter().collect::<Vec<_>>() != ["row", "col", "value"] {
            return Err(Error::Format("missing row,col,value header".into()));
        }
        let mut values = vec![0.0; grid.len()];
        let mut seen = vec![false; grid.len()];
        for rec in records {
            let rec = rec?;
            let bad = || Error::Format(format!("bad record {rec:?}"));
            let r: usize = rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let c: usize = rec.get(1).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let v: f64 = rec.get(2).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if r >= n || c >= n {
                return Err(bad());
            }
            values[grid.index(r, c)] = v;
            seen[grid.index(r, c)] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Format("grid function file does not cover every cell".into()));
        }
        Ok(Self { grid, values })
    }

    /// Little-endian binary layout: `VFGF`, `u32 n`, `f64` origin x, origin y
    /// and spacing, then the values row-major.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let n = u32::try_from(self.grid.n).map_err(|_| Error::Parameter("grid too large for binary layout".into()))?;
        w.write_all(MAGIC)?;
        w.write_all(&n.to_le_bytes())?;
        for x in [self.grid.origin[0], self.grid.origin[1], self.grid.spacing] {
            w.write_all(&x.to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a VFGF grid function".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        let mut b8 = [0u8; 8];
        let mut next = || -> Result<f64> {
            r.read_exact(&mut b8)?;
            Ok(f64::from_le_bytes(b8))
        };
        let grid = GridSpec::new([next()?, next()?], next()?, n)?;
        let values = (0..grid.len()).map(|_| next()).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new([-1.0, 0.5], 0.25, 8).unwrap()
    }

    #[test]
    fn bilinear_is_exact_on_affine_data_inside() {
        let f = GridFunction::from_fn(grid(), |p| 3.0 * p[0] - 2.0 * p[1] + 0.5);
        for p in [[-0.8, 0.7], [0.0, 1.3], [0.6, 2.3]] {
            assert!((f.sample(p) - (3.0 * p[0] - 2.0 * p[1] + 0.5)).abs() < 1e-12);
        }
        assert_eq!(f.sample([5.0, 5.0]), 0.0);
        assert_eq!(f.sample(grid().cell_center(3, 4)), f.get(3, 4));
    }

    #[test]
    fn norms_and_cauchy_schwarz() {
        let f = GridFunction::from_fn(grid(), |p| (p[0] * 7.0).sin() + p[1]);
        let area = grid().side().powi(2);
        assert!(f.l1() <= f.l2() * area.sqrt());
        assert!(f.linf() >= f.l2() / area.sqrt());
        let one = GridFunction::from_fn(grid(), |_| 1.0);
        assert!((one.l1() - area).abs() < 1e-12);
    }

    #[test]
    fn csv_and_binary_round_trip() {
        let f = GridFunction::from_fn(grid(), |p| p[0] * 0.1 + p[1].exp());
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert_eq!(GridFunction::read_csv(buf.as_slice()).unwrap(), f);
        let mut bin = Vec::new();
        f.write_binary(&mut bin).unwrap();
        assert_eq!(&bin[..4], b"VFGF");
        assert_eq!(bin.len(), 4 + 4 + 24 + 8 * 64);
        assert_eq!(GridFunction::read_binary(bin.as_slice()).unwrap(), f);
        assert!(GridFunction::read_binary(&b"NOPE0000"[..]).is_err());
    }
}
