//! Planar C¹ vector fields: the catalog kinds, evaluation, and C¹ bounds.
//!
//! Every field lives on an axis-aligned box `Ω` together with a padding
//! margin `m`; evaluation is defined on the padded box `Ω ⊕ m` and nowhere
//! else, so segments `x + t v(x)` must be kept inside it by the caller
//! (see [`FieldBounds::epsilon0`]).

use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub min: Point,
    pub max: Point,
}

impl BoxDomain {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if !(min[0] < max[0] && min[1] < max[1]) {
            return Err(Error::Parameter(format!("empty box {min:?}..{max:?}")));
        }
        Ok(Self { min, max })
    }

    pub fn square(half: f64) -> Self {
        Self { min: [-half, -half], max: [half, half] }
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Closed-box membership.
    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }

    pub fn expand(&self, m: f64) -> Self {
        Self { min: [self.min[0] - m, self.min[1] - m], max: [self.max[0] + m, self.max[1] + m] }
    }
}

/// Shear profile `g` of a field `v(x) = (1, g(x₁))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShearProfile {
    /// `s ↦ s^k`
    Monomial(u32),
    /// `s ↦ exp(-1/|s|^γ)·sgn(s)`, extended by 0 at the origin.
    Flat(f64),
}

impl ShearProfile {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            ShearProfile::Monomial(k) => s.powi(k as i32),
            ShearProfile::Flat(gamma) => {
                if s == 0.0 {
                    0.0
                } else {
                    (-1.0 / s.abs().powf(gamma)).exp() * s.signum()
                }
            }
        }
    }
}

/// Values of a field on a rectangular lattice, interpolated bilinearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledGrid {
    pub origin: Point,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, index `j * nx + i` for the node at `origin + (i, j)·spacing`.
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
}

impl SampledGrid {
    pub fn extent(&self) -> BoxDomain {
        BoxDomain {
            min: self.origin,
            max: [
                self.origin[0] + (self.nx - 1) as f64 * self.spacing,
                self.origin[1] + (self.ny - 1) as f64 * self.spacing,
            ],
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0) {
            return Err(Error::Parameter("grid spacing must be positive".into()));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Parameter("lattice needs at least 2×2 nodes".into()));
        }
        if self.vx.len() != self.nx * self.ny || self.vy.len() != self.nx * self.ny {
            return Err(Error::Parameter("value array dimensions do not match lattice".into()));
        }
        Ok(())
    }

    fn node(&self, i: usize, j: usize) -> Point {
        let k = j * self.nx + i;
        [self.vx[k], self.vy[k]]
    }

    fn interpolate(&self, p: Point) -> Point {
        let gx = (p[0] - self.origin[0]) / self.spacing;
        let gy = (p[1] - self.origin[1]) / self.spacing;
        let i = (gx.floor().max(0.0) as usize).min(self.nx - 2);
        let j = (gy.floor().max(0.0) as usize).min(self.ny - 2);
        let fx = gx - i as f64;
        let fy = gy - j as f64;
        let a = self.node(i, j);
        let b = self.node(i + 1, j);
        let c = self.node(i, j + 1);
        let d = self.node(i + 1, j + 1);
        let mut out = [0.0; 2];
        for k in 0..2 {
            out[k] = (1.0 - fy) * ((1.0 - fx) * a[k] + fx * b[k]) + fy * ((1.0 - fx) * c[k] + fx * d[k]);
        }
        out
    }

    /// Builds a lattice by sampling `f` at every node.
    pub fn from_fn(origin: Point, spacing: f64, nx: usize, ny: usize, f: impl Fn(Point) -> Point) -> Self {
        let mut vx = Vec::with_capacity(nx * ny);
        let mut vy = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let v = f([origin[0] + i as f64 * spacing, origin[1] + j as f64 * spacing]);
                vx.push(v[0]);
                vy.push(v[1]);
            }
        }
        Self { origin, spacing, nx, ny, vx, vy }
    }

    /// Reads a lattice from CSV with header `x,y,vx,vy`. Rows may come in any
    /// order but must fill a rectangular lattice with uniform spacing.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["x", "y", "vx", "vy"];
        if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::Format(format!("expected header x,y,vx,vy, found {:?}", headers)));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let mut vals = [0.0; 4];
            for (k, v) in vals.iter_mut().enumerate() {
                *v = rec[k]
                    .parse()
                    .map_err(|_| Error::Format(format!("bad number {:?} in row {}", &rec[k], rows.len() + 1)))?;
            }
            rows.push(vals);
        }
        if rows.is_empty() {
            return Err(Error::Format("empty lattice".into()));
        }
        let mut xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let mut ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        for v in [&mut xs, &mut ys] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let (nx, ny) = (xs.len(), ys.len());
        if nx < 2 || ny < 2 || nx * ny != rows.len() {
            return Err(Error::Format(format!("{} rows do not form a rectangular lattice", rows.len())));
        }
        let spacing = xs[1] - xs[0];
        let uniform = |v: &[f64]| v.windows(2).all(|w| ((w[1] - w[0]) - spacing).abs() <= 1e-9 * spacing.abs().max(1.0));
        if !(spacing > 0.0) || !uniform(&xs) || !uniform(&ys) {
            return Err(Error::Format("lattice spacing is not uniform".into()));
        }
        let origin = [xs[0], ys[0]];
        let mut vx = vec![f64::NAN; nx * ny];
        let mut vy = vec![f64::NAN; nx * ny];
        for r in &rows {
            let i = ((r[0] - origin[0]) / spacing).round() as usize;
            let j = ((r[1] - origin[1]) / spacing).round() as usize;
            let k = j * nx + i;
            if !vx[k].is_nan() {
                return Err(Error::Format(format!("duplicate lattice node ({}, {})", r[0], r[1])));
            }
            vx[k] = r[2];
            vy[k] = r[3];
        }
        Ok(Self { origin, spacing, nx, ny, vx, vy })
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["x", "y", "vx", "vy"])?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = j * self.nx + i;
                let x = self.origin[0] + i as f64 * self.spacing;
                let y = self.origin[1] + j as f64 * self.spacing;
                wtr.write_record([x, y, self.vx[k], self.vy[k]].map(|v| format!("{v:?}")))?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Constant(Point),
    /// `v(x) = (-x₂, x₁)`
    Rotation,
    /// `v(x) = (1, x₁^k)`
    Shear { power: u32 },
    /// `v(x) = (1, exp(-1/|x₁|^γ)·sgn x₁)`
    Flat { gamma: f64 },
    GridSampled(SampledGrid),
}

impl FieldKind {
    pub fn name(&self) -> &'static str {
        match self {
            FieldKind::Constant(_) => "constant",
            FieldKind::Rotation => "rotation",
            FieldKind::Shear { .. } => "shear",
            FieldKind::Flat { .. } => "flat",
            FieldKind::GridSampled(_) => "grid_sampled",
        }
    }

    pub fn shear_profile(&self) -> Option<ShearProfile> {
        match *self {
            FieldKind::Shear { power } => Some(ShearProfile::Monomial(power)),
            FieldKind::Flat { gamma } => Some(ShearProfile::Flat(gamma)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub domain: BoxDomain,
    pub margin: f64,
    pub label: String,
}

impl FieldSpec {
    /// Field with the default padding margin of a quarter of the box diameter.
    pub fn new(kind: FieldKind, domain: BoxDomain, label: impl Into<String>) -> Result<Self> {
        let margin = 0.25 * domain.diameter();
        Self::with_margin(kind, domain, margin, label)
    }

    pub fn with_margin(kind: FieldKind, domain: BoxDomain, margin: f64, label: impl Into<String>) -> Result<Self> {
        if !(margin > 0.0) {
            return Err(Error::Parameter("padding margin must be positive".into()));
        }
        let spec = Self { kind, domain, margin, label: label.into() };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        match &self.kind {
            FieldKind::Shear { power } if *power < 1 => {
                Err(Error::Parameter("shear monomial power must be ≥ 1".into()))
            }
            FieldKind::Flat { gamma } if !(*gamma > 0.0 && *gamma < 1.0) => {
                Err(Error::Parameter(format!("flat exponent γ = {gamma} outside (0, 1)")))
            }
            FieldKind::GridSampled(grid) => {
                grid.validate()?;
                let ext = grid.extent();
                let padded = self.padded();
                if !(ext.contains(padded.min) && ext.contains(padded.max)) {
                    return Err(Error::Parameter("sampled lattice does not cover the padded box".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn padded(&self) -> BoxDomain {
        self.domain.expand(self.margin)
    }

    pub fn evaluate(&self, p: Point) -> Result<Point> {
        if !self.padded().contains(p) {
            return Err(Error::Domain(p));
        }
        Ok(self.eval_unchecked(p))
    }

    pub(crate) fn eval_unchecked(&self, p: Point) -> Point {
        match &self.kind {
            FieldKind::Constant(v) => *v,
            FieldKind::Rotation => [-p[1], p[0]],
            FieldKind::Shear { power } => [1.0, ShearProfile::Monomial(*power).eval(p[0])],
            FieldKind::Flat { gamma } => [1.0, ShearProfile::Flat(*gamma).eval(p[0])],
            FieldKind::GridSampled(grid) => grid.interpolate(p),
        }
    }

    /// Smooth pseudo-random field `(1 + a·n₁, a·n₂)` sampled on a lattice that
    /// covers the padded box; `n` is uniform on [-1, 1] per node.
    pub fn noise(domain: BoxDomain, spacing: f64, amplitude: f64, seed: u64, label: impl Into<String>) -> Result<Self> {
        let margin = 0.25 * domain.diameter();
        let padded = domain.expand(margin);
        let nx = (padded.width() / spacing).ceil() as usize + 1;
        let ny = (padded.height() / spacing).ceil() as usize + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vx = Vec::with_capacity(nx * ny);
        let mut vy = Vec::with_capacity(nx * ny);
        for _ in 0..nx * ny {
            vx.push(1.0 + amplitude * rng.gen_range(-1.0..=1.0));
            vy.push(amplitude * rng.gen_range(-1.0..=1.0));
        }
        let grid = SampledGrid { origin: padded.min, spacing, nx, ny, vx, vy };
        Self::with_margin(FieldKind::GridSampled(grid), domain, margin, label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldBounds {
    /// Estimated C¹ norm.
    pub b: f64,
    pub sup_v: f64,
    pub epsilon0: f64,
}

fn op_norm(j: [[f64; 2]; 2]) -> f64 {
    let s = j[0][0].powi(2) + j[0][1].powi(2) + j[1][0].powi(2) + j[1][1].powi(2);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = (s * s - 4.0 * det * det).max(0.0);
    ((s + disc.sqrt()) / 2.0).sqrt()
}

/// Estimates `‖v‖_{C¹}` over a `(res+1)²` sample grid of `Ω` with central
/// differences at spacing `box size / res`, and derives the admissible
/// maximal scale `ε₀ = min(m / sup|v|, 1 / (100·max(B, 1)))`.
pub fn field_bounds(spec: &FieldSpec, grid_resolution: usize) -> Result<FieldBounds> {
    if grid_resolution < 16 {
        return Err(Error::Parameter(format!("grid resolution {grid_resolution} < 16")));
    }
    let d = &spec.domain;
    let hx = d.width() / grid_resolution as f64;
    let hy = d.height() / grid_resolution as f64;
    let mut b = 0.0f64;
    let mut sup_v = 0.0f64;
    for j in 0..=grid_resolution {
        for i in 0..=grid_resolution {
            let p = [d.min[0] + i as f64 * hx, d.min[1] + j as f64 * hy];
            let v = spec.evaluate(p)?;
            let xp = spec.evaluate([p[0] + hx, p[1]])?;
            let xm = spec.evaluate([p[0] - hx, p[1]])?;
            let yp = spec.evaluate([p[0], p[1] + hy])?;
            let ym = spec.evaluate([p[0], p[1] - hy])?;
            let jac = [
                [(xp[0] - xm[0]) / (2.0 * hx), (yp[0] - ym[0]) / (2.0 * hy)],
                [(xp[1] - xm[1]) / (2.0 * hx), (yp[1] - ym[1]) / (2.0 * hy)],
            ];
            let speed = v[0].hypot(v[1]);
            sup_v = sup_v.max(speed);
            b = b.max(speed).max(op_norm(jac));
        }
    }
    // bilinear interpolants peak at lattice nodes; the reach of the segments
    // must be controlled by the node maximum near Ω, not the sample maximum
    let mut reach_speed = sup_v;
    if let FieldKind::GridSampled(grid) = &spec.kind {
        let near = spec.domain.expand(grid.spacing);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let p = [grid.origin[0] + i as f64 * grid.spacing, grid.origin[1] + j as f64 * grid.spacing];
                if near.contains(p) {
                    let v = grid.node(i, j);
                    reach_speed = reach_speed.max(v[0].hypot(v[1]));
                }
            }
        }
    }
    let epsilon0 = (spec.margin / reach_speed).min(1.0 / (100.0 * b.max(1.0)));
    Ok(FieldBounds { b, sup_v, epsilon0 })
}
