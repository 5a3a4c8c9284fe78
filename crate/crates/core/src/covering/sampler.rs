use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AdmissibleFamily;
use crate::error::{Error, Result};
use crate::exact::{rational, ExactSum};
use crate::field::{BoxDomain, FieldKind, FieldSpec};
use crate::geometry::{population, GridSpec, OrientedRect};
use crate::operators::{GridFunction, WidthRule};

/// Rotation field on the unit box centered at `(0, 40)`, where the field
/// direction turns by about `1/40` across the box.
pub fn far_rotation_field() -> FieldSpec {
    let domain = BoxDomain::new([-0.5, 39.5], [0.5, 40.5]).expect("valid box");
    FieldSpec::new(FieldKind::Rotation, domain, "far rotation").expect("valid field")
}

pub fn far_rotation_grid(n: usize) -> Result<GridSpec> {
    GridSpec::covering([-0.5, 39.5], 1.0, n)
}

/// Seeded random families on the far rotation field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilySampler {
    pub grid_n: usize,
    pub max_members: usize,
    /// Lengths are drawn uniformly from this range; `W = θL·u`, `u ∈ [1, 2)`.
    pub length_range: [f64; 2],
    /// Centers are drawn from the box shrunk by this margin on every side.
    pub center_margin: f64,
    /// Axis offset from the field direction at the center, as a fraction of `θ`.
    pub max_offset: f64,
    /// Fraction of cells carrying a nonzero value of `f`.
    pub f_density: f64,
    /// `λ` is this quantile of the member means; members at or below it are dropped.
    pub lambda_quantile: f64,
    pub max_attempts: usize,
}

impl Default for FamilySampler {
    fn default() -> Self {
        Self {
            grid_n: 256,
            max_members: 64,
            length_range: [0.3, 0.9],
            center_margin: 0.2,
            max_offset: 0.25,
            f_density: 0.2,
            lambda_quantile: 0.25,
            max_attempts: 2048,
        }
    }
}

/// Draws rectangles aligned (up to a small offset) with the field, keeps the
/// dense ones, then samples a sparse nonnegative `f` and a level `λ` below
/// most member means.
pub fn sample_family(sampler: &FamilySampler, delta: f64, theta: f64, seed: u64) -> Result<AdmissibleFamily> {
    let [lmin, lmax] = sampler.length_range;
    if !(lmin > 0.0 && lmin <= lmax && sampler.max_members > 0 && (0.0..1.0).contains(&sampler.lambda_quantile)) {
        return Err(Error::Parameter(format!("invalid sampler {sampler:?}")));
    }
    let field = far_rotation_field();
    let grid = far_rotation_grid(sampler.grid_n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class = WidthRule::Eccentricity { theta };
    let cell = rational(grid.cell_area());
    let (lo, hi) = (field.domain.min, field.domain.max);
    let m = sampler.center_margin;

    let mut rects = Vec::new();
    for _ in 0..sampler.max_attempts {
        if rects.len() == sampler.max_members {
            break;
        }
        let center = [rng.gen_range(lo[0] + m..hi[0] - m), rng.gen_range(lo[1] + m..hi[1] - m)];
        let length = if lmin == lmax { lmin } else { rng.gen_range(lmin..lmax) };
        let width = theta * length * rng.gen_range(1.0..2.0);
        let offset = theta * sampler.max_offset * rng.gen_range(-1.0..1.0);
        let v = field.evaluate(center)?;
        let alpha = (v[1].atan2(v[0]) + offset).rem_euclid(PI);
        let rect = OrientedRect::new(center, alpha, length, width)?;
        if !class.admits(&rect) {
            continue;
        }
        let pop = population(&field, &rect, &grid)?.mask;
        if !pop.is_empty()
            && &cell * rational(pop.count() as f64) >= rational(delta) * rational(rect.length) * rational(rect.width)
        {
            rects.push(rect);
        }
    }
    if rects.is_empty() {
        return Err(Error::Parameter(format!("no dense rectangle found for δ = {delta}, θ = {theta}")));
    }

    let values: Vec<f64> =
        (0..grid.len()).map(|_| if rng.gen_bool(sampler.f_density) { rng.gen_range(0.0..1.0) } else { 0.0 }).collect();
    let f = GridFunction::new(grid, values)?;
    let means: Vec<f64> = rects
        .iter()
        .map(|r| {
            let cells: Vec<usize> = population(&field, r, &grid).map(|p| p.mask.indices().collect()).unwrap_or_default();
            f.abs_mean_over(&cells)
        })
        .collect();
    let mut sorted = means.clone();
    sorted.sort_by(f64::total_cmp);
    let mut lambda = sorted[(sampler.lambda_quantile * sorted.len() as f64) as usize];
    if !(lambda > 0.0) {
        lambda = sorted.iter().copied().find(|m| *m > 0.0).unwrap_or(0.0) / 2.0;
    }
    if !(lambda > 0.0) {
        return Err(Error::Parameter("every member mean vanishes".into()));
    }
    // keep members whose exact mean exceeds λ
    let kept: Vec<OrientedRect> = rects
        .into_iter()
        .filter(|r| {
            let pop = population(&field, r, &grid).expect("evaluated above").mask;
            let sum: ExactSum = pop.indices().map(|i| f.values[i]).collect();
            sum.value() > rational(lambda) * rational(pop.count() as f64)
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::Parameter(format!("no member mean exceeds λ = {lambda}")));
    }
    AdmissibleFamily::new(field, f, kept, delta, theta, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{covering_certificate, greedy_disjoint, is_maximal_disjoint};

    #[test]
    fn sampled_families_are_admissible_and_deterministic() {
        let s = FamilySampler::default();
        for (delta, theta) in [(0.1, 0.005), (0.5, 0.009)] {
            let a = sample_family(&s, delta, theta, 42).unwrap();
            let b = sample_family(&s, delta, theta, 42).unwrap();
            assert_eq!(a.rects(), b.rects());
            assert_eq!(a.lambda(), b.lambda());
            assert!(a.len() > 8 && a.len() <= 64, "{}", a.len());
            let sel = greedy_disjoint(&a);
            assert!(is_maximal_disjoint(&a, &sel.selected));
            assert!(sel.selected.len() < a.len());
            covering_certificate(&a).unwrap();
        }
    }

    #[test]
    fn invalid_sampler_rejected() {
        let s = FamilySampler { length_range: [0.5, 0.2], ..FamilySampler::default() };
        assert!(sample_family(&s, 0.1, 0.005, 0).is_err());
    }
}
