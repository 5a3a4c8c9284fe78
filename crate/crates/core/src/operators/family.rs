use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GridFunction;
use crate::error::{Error, Result};
use crate::exact::rational;
use crate::field::FieldSpec;
use crate::geometry::{population, raster_indices, GridSpec, OrientedRect, RasterMask};

/// Width class of a candidate family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WidthRule {
    /// `θ ≤ W/L < 2θ`, enumerated as `W ∈ {θL, 1.5θL}`
    Eccentricity { theta: f64 },
    /// `w ≤ W < 2w`, enumerated as `W ∈ {w, 1.5w}`
    Width { w: f64 },
}

impl WidthRule {
    fn widths(&self, length: f64) -> [f64; 2] {
        match *self {
            WidthRule::Eccentricity { theta } => [theta * length, 1.5 * theta * length],
            WidthRule::Width { w } => [w, 1.5 * w],
        }
    }

    pub fn admits(&self, rect: &OrientedRect) -> bool {
        match *self {
            WidthRule::Eccentricity { theta } => {
                let (w, l) = (rational(rect.width), rational(rect.length));
                let t = rational(theta);
                &t * &l <= w && w < rational(2.0) * t * l
            }
            WidthRule::Width { w } => w <= rect.width && rect.width < 2.0 * w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrientationRule {
    /// `α = kπ/count`
    Uniform { count: usize },
    /// `count` angles spread evenly over `±spread/2` around the field direction at the center.
    FieldAligned { count: usize, spread: f64 },
}

/// Size caps `L < 1/(100B)`, `W < B/100`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaceyLiCaps {
    pub b: f64,
}

impl LaceyLiCaps {
    pub fn admits(&self, rect: &OrientedRect) -> bool {
        rect.length < 1.0 / (100.0 * self.b) && rect.width < self.b / 100.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    /// Centers at cell `(stride/2 + i·stride, stride/2 + j·stride)`.
    pub stride: usize,
    pub orientation: OrientationRule,
    pub lengths: Vec<f64>,
    pub width_rule: WidthRule,
    pub caps: Option<LaceyLiCaps>,
    /// Keep a seeded random subset of at most this many members.
    pub limit: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub rect: OrientedRect,
    /// Raster of `R`, row-major indices.
    pub cells: Vec<usize>,
    /// Raster of `V(R)`, row-major indices.
    pub population: Vec<usize>,
    pub zero_cells: usize,
}

impl Candidate {
    pub fn new(field: &FieldSpec, grid: &GridSpec, rect: OrientedRect) -> Result<Self> {
        let pop = population(field, &rect, grid)?;
        Ok(Self { rect, cells: raster_indices(&rect, grid), population: pop.mask.indices().collect(), zero_cells: pop.zero_cells })
    }

    /// `|V(R)| ≥ δ|R|` with `|V(R)|` the raster measure and `|R| = L·W`, compared exactly.
    pub fn is_dense(&self, delta: f64, grid: &GridSpec) -> bool {
        let v = rational(grid.cell_area()) * rational(self.population.len() as f64);
        v >= rational(delta) * rational(self.rect.length) * rational(self.rect.width)
    }

    pub fn population_mask(&self, grid: &GridSpec) -> RasterMask {
        RasterMask::from_indices(*grid, self.population.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateFamily {
    pub grid: GridSpec,
    pub width_rule: WidthRule,
    pub caps: Option<LaceyLiCaps>,
    pub members: Vec<Candidate>,
}

impl CandidateFamily {
    pub fn build(field: &FieldSpec, grid: &GridSpec, spec: &FamilySpec) -> Result<Self> {
        if spec.stride == 0 || spec.lengths.is_empty() {
            return Err(Error::Parameter("family needs a positive stride and at least one length".into()));
        }
        let mut rects = Vec::new();
        let start = spec.stride / 2;
        for row in (start..grid.n).step_by(spec.stride) {
            for col in (start..grid.n).step_by(spec.stride) {
                let center = grid.cell_center(row, col);
                let angles: Vec<f64> = match spec.orientation {
                    OrientationRule::Uniform { count } => (0..count).map(|k| k as f64 * PI / count as f64).collect(),
                    OrientationRule::FieldAligned { count, spread } => {
                        let v = field.evaluate(center)?;
                        if v == [0.0, 0.0] {
                            continue;
                        }
                        let base = v[1].atan2(v[0]);
                        (0..count)
                            .map(|k| if count == 1 { base } else { base + spread * (k as f64 / (count - 1) as f64 - 0.5) })
                            .collect()
                    }
                };
                for &alpha in &angles {
                    for &l in &spec.lengths {
                        for w in spec.width_rule.widths(l) {
                            let rect = OrientedRect::new(center, alpha, l, w)?;
                            if spec.caps.is_some_and(|c| !c.admits(&rect)) || !spec.width_rule.admits(&rect) {
                                continue;
                            }
                            rects.push(rect);
                        }
                    }
                }
            }
        }
        if let Some(limit) = spec.limit {
            if rects.len() > limit {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                let mut keep = rand::seq::index::sample(&mut rng, rects.len(), limit).into_vec();
                keep.sort_unstable();
                rects = keep.into_iter().map(|i| rects[i]).collect();
            }
        }
        let members = rects.into_par_iter().map(|r| Candidate::new(field, grid, r)).collect::<Result<_>>()?;
        Ok(Self { grid: *grid, width_rule: spec.width_rule, caps: spec.caps, members })
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self { members: indices.iter().map(|&i| self.members[i].clone()).collect(), ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalOutput {
    pub values: GridFunction,
    /// Number of members that entered the supremum.
    pub admissible: usize,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parameter(format!("density δ = {delta} outside (0, 1]")));
    }
    Ok(())
}

/// Pointwise max of `mean_S |f|` over `x ∈ S`, where `S` ranges over the
/// selected cell sets.
fn sup_of_means<'a>(f: &GridFunction, sets: Vec<&'a [usize]>, what: &str) -> MaximalOutput {
    let means: Vec<f64> = sets.par_iter().map(|s| f.abs_mean_over(s)).collect();
    let mut out = GridFunction::zeros(f.grid);
    for (set, m) in sets.iter().zip(&means) {
        for &i in set.iter() {
            if *m > out.values[i] {
                out.values[i] = *m;
            }
        }
    }
    if sets.is_empty() {
        log::warn!("{what}: no admissible member, returning the zero function");
    }
    MaximalOutput { values: out, admissible: sets.len() }
}

/// `M̃_{v,δ,θ} f(x) = sup χ_{V(R)}(x) · mean_{V(R)} |f|` over members with
/// `|V(R)| ≥ δ|R|` in the eccentricity class `θ`.
pub fn tilde_maximal(f: &GridFunction, family: &CandidateFamily, delta: f64, theta: f64) -> Result<MaximalOutput> {
    check_delta(delta)?;
    if !(theta > 0.0 && theta < 0.01) {
        return Err(Error::Parameter(format!("eccentricity θ = {theta} outside (0, 1/100)")));
    }
    if family.width_rule != (WidthRule::Eccentricity { theta }) {
        return Err(Error::Parameter(format!("family width rule {:?} is not the θ = {theta} class", family.width_rule)));
    }
    if f.grid != family.grid {
        return Err(Error::GridMismatch);
    }
    let sets = family
        .members
        .iter()
        .filter(|m| !m.population.is_empty() && m.is_dense(delta, &family.grid))
        .map(|m| m.population.as_slice())
        .collect();
    Ok(sup_of_means(f, sets, "tilde maximal"))
}

/// `M_{v,δ,w} f(x) = sup χ_R(x) · mean_R |f|` over members with `|V(R)| ≥ δ|R|`
/// in the width class `w` and under the size caps.
pub fn laceyli_maximal(f: &GridFunction, family: &CandidateFamily, delta: f64) -> Result<MaximalOutput> {
    check_delta(delta)?;
    if !matches!(family.width_rule, WidthRule::Width { .. }) {
        return Err(Error::Parameter("Lacey–Li maximal function needs a width-class family".into()));
    }
    let caps = family.caps.ok_or_else(|| Error::Parameter("Lacey–Li maximal function needs size caps".into()))?;
    if f.grid != family.grid {
        return Err(Error::GridMismatch);
    }
    for (index, m) in family.members.iter().enumerate() {
        if !caps.admits(&m.rect) {
            return Err(Error::Inadmissible { index, reason: format!("exceeds size caps for B = {}", caps.b) });
        }
    }
    let sets = family
        .members
        .iter()
        .filter(|m| !m.cells.is_empty() && m.is_dense(delta, &family.grid))
        .map(|m| m.cells.as_slice())
        .collect();
    Ok(sup_of_means(f, sets, "Lacey–Li maximal"))
}

/// Log-spaced λ values bracketing the positive range of `mf`:
/// from half the smallest positive value up to just below the maximum.
pub fn lambda_log_bracket(mf: &GridFunction, count: usize) -> Vec<f64> {
    let positive = mf.values.iter().copied().filter(|v| *v > 0.0);
    let lo = positive.clone().fold(f64::INFINITY, f64::min);
    let hi = positive.fold(0.0, f64::max);
    if hi == 0.0 || count == 0 {
        return Vec::new();
    }
    let (a, b) = ((lo / 2.0).ln(), (hi * (1.0 - 1e-12)).ln());
    if count == 1 {
        return vec![b.exp()];
    }
    (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect()
}

fn level_counts(mf: &GridFunction) -> Vec<f64> {
    let mut sorted: Vec<f64> = mf.values.iter().map(|v| v.abs()).collect();
    sorted.sort_by(f64::total_cmp);
    sorted
}

/// `max_λ λ·|{Mf > λ}| / ‖f‖₁` over the given λ values.
pub fn weak_type_ratio(mf: &GridFunction, f: &GridFunction, lambdas: &[f64]) -> Result<f64> {
    let norm = f.l1();
    if !(norm > 0.0) {
        return Err(Error::Parameter("‖f‖₁ must be positive".into()));
    }
    let sorted = level_counts(mf);
    let cell = mf.grid.cell_area();
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let above = sorted.len() - sorted.partition_point(|&v| v <= lambda);
            lambda * above as f64 * cell / norm
        })
        .fold(0.0, f64::max))
}

/// Exact `sup_λ λ·|{Mf > λ}| / ‖f‖₁`, attained as λ increases to a value of `Mf`.
pub fn weak_type_sup(mf: &GridFunction, f: &GridFunction) -> Result<f64> {
    let norm = f.l1();
    if !(norm > 0.0) {
        return Err(Error::Parameter("‖f‖₁ must be positive".into()));
    }
    let sorted = level_counts(mf);
    let cell = mf.grid.cell_area();
    Ok(sorted
        .iter()
        .filter(|v| **v > 0.0)
        .map(|&v| {
            let at_least = sorted.len() - sorted.partition_point(|&u| u < v);
            v * at_least as f64 * cell / norm
        })
        .fold(0.0, f64::max))
}
