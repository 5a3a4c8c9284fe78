//! Greedy disjoint selection over a finite admissible family, the pairwise
//! containment lemma, 10-fold dilation cover and the weak-type measure chain
//!
//! `|K| ≤ Σ|R'ᵢ| ≤ 100 Σ|Rᵢ| ≤ (100/δ) Σ|V(Rᵢ)| ≤ (100/δλ) Σ ∫_{V(Rᵢ)} |f| ≤ (100/δλ) ‖f‖₁`
//!
//! with `K` the raster union of all populations. Every link is checked in
//! exact rational arithmetic on the raster measures; `|R'| = 10²|R|` is the
//! area of the exact dilation.

mod sampler;

pub use sampler::{far_rotation_field, far_rotation_grid, sample_family, FamilySampler};

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational, to_f64, ExactSum};
use crate::field::FieldSpec;
use crate::geometry::{line_angle, population, rasterize, GridSpec, OrientedRect, RasterMask};
use crate::operators::{GridFunction, WidthRule};

pub const DILATION: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub rect: OrientedRect,
    pub population: RasterMask,
    /// `mean_{V(R)} |f|`
    pub mean: f64,
}

/// Finite family with `|V(R)| ≥ δ|R|`, `θ ≤ W/L < 2θ` and `mean_{V(R)} |f| > λ`
/// for every member, each checked exactly at construction.
#[derive(Debug, Clone)]
pub struct AdmissibleFamily {
    field: FieldSpec,
    f: GridFunction,
    members: Vec<Member>,
    delta: f64,
    theta: f64,
    lambda: f64,
}

fn abs_sum(f: &GridFunction, mask: &RasterMask) -> ExactSum {
    mask.indices().map(|i| f.values[i].abs()).collect()
}

impl AdmissibleFamily {
    /// Computes each population on `f`'s grid and rejects the first
    /// inadmissible rectangle.
    pub fn new(field: FieldSpec, f: GridFunction, rects: Vec<OrientedRect>, delta: f64, theta: f64, lambda: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Parameter(format!("density δ = {delta} outside (0, 1]")));
        }
        if !(theta > 0.0 && theta < 0.5) {
            return Err(Error::Parameter(format!("eccentricity θ = {theta} outside (0, 1/2)")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!("level λ = {lambda} must be finite and positive")));
        }
        if rects.is_empty() {
            return Err(Error::Parameter("family is empty".into()));
        }
        let grid = f.grid;
        let class = WidthRule::Eccentricity { theta };
        let cell = rational(grid.cell_area());
        let members = rects
            .par_iter()
            .enumerate()
            .map(|(index, rect)| {
                let reject = |reason: String| Error::Inadmissible { index, reason };
                if !class.admits(rect) {
                    return Err(reject(format!("W/L = {} outside [θ, 2θ)", rect.eccentricity())));
                }
                let pop = population(&field, rect, &grid)?.mask;
                let count = rational(pop.count() as f64);
                if &cell * &count < rational(delta) * rational(rect.length) * rational(rect.width) {
                    return Err(reject(format!("|V(R)| = {} below δ|R|", pop.measure())));
                }
                let sum = abs_sum(&f, &pop).value();
                if pop.is_empty() || sum <= rational(lambda) * count {
                    return Err(reject(format!("mean over V(R) does not exceed λ = {lambda}")));
                }
                let mean = f.abs_mean_over(&pop.indices().collect::<Vec<_>>());
                Ok(Member { rect: *rect, population: pop, mean })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { field, f, members, delta, theta, lambda })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn f(&self) -> &GridFunction {
        &self.f
    }

    pub fn grid(&self) -> &GridSpec {
        &self.f.grid
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rects(&self) -> Vec<OrientedRect> {
        self.members.iter().map(|m| m.rect).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Selected member indices in selection order.
    pub selected: Vec<usize>,
    /// For each member, the first selected member (in selection order) whose
    /// population meets its own; a selected member is its own witness.
    pub witness: Vec<usize>,
}

/// Greedy selection in the order (L desc, |V| desc, index asc): a member is
/// taken iff its population misses every population taken before it.
pub fn greedy_disjoint(family: &AdmissibleFamily) -> Selection {
    let members = family.members();
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| {
        let (ma, mb) = (&members[a], &members[b]);
        mb.rect
            .length
            .total_cmp(&ma.rect.length)
            .then(mb.population.count().cmp(&ma.population.count()))
            .then(a.cmp(&b))
    });
    let mut taken = RasterMask::empty(*family.grid());
    let mut selected = Vec::new();
    for i in order {
        let pop = &members[i].population;
        if taken.is_disjoint(pop).expect("same grid") {
            taken.union_with(pop).expect("same grid");
            selected.push(i);
        }
    }
    let witness = (0..members.len())
        .into_par_iter()
        .map(|j| {
            *selected
                .iter()
                .find(|&&i| !members[i].population.is_disjoint(&members[j].population).expect("same grid"))
                .expect("selection is maximal")
        })
        .collect();
    Selection { selected, witness }
}

/// Exhaustive post-check: selected populations are pairwise disjoint and
/// every member meets a selected population of length at least its own.
pub fn is_maximal_disjoint(family: &AdmissibleFamily, selected: &[usize]) -> bool {
    let m = family.members();
    let disjoint = selected.iter().enumerate().all(|(k, &a)| {
        selected[k + 1..].iter().all(|&b| m[a].population.is_disjoint(&m[b].population).expect("same grid"))
    });
    disjoint
        && (0..m.len()).all(|j| {
            selected.iter().any(|&i| {
                m[i].rect.length >= m[j].rect.length && !m[i].population.is_disjoint(&m[j].population).expect("same grid")
            })
        })
}

/// Numbers behind one application of the containment lemma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEvidence {
    pub member: usize,
    pub selected: usize,
    /// Shared cell (row-major index).
    pub z0: usize,
    /// Line angle between the two long axes.
    pub phi0: f64,
    /// Line angle between `v(z₀)` and the axis of the member.
    pub phi1: f64,
    /// Line angle between `v(z₀)` and the axis of the selected rectangle.
    pub phi2: f64,
    pub two_theta: f64,
    /// Extent of the member along the selected rectangle's normal, and its bound `4W`.
    pub normal_extent: f64,
    pub normal_bound: f64,
    /// Extent of the member along the selected rectangle's axis, and its bound `2L₀`.
    pub axis_extent: f64,
    pub axis_bound: f64,
    /// Smallest inward distance from a member corner to the boundary of the 10-fold dilation.
    pub containment_slack: f64,
    /// Distance from the center of `z₀` to the nearer boundary of the two rectangles.
    pub margin: f64,
    /// `margin < 2h`: the shared cell sits near a rectangle edge at raster resolution.
    pub near_edge: bool,
    /// Outcome of assertions (i)–(iv).
    pub checks: [bool; 4],
}

impl PairEvidence {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| *c)
    }
}

fn extent_along(rect: &OrientedRect, dir: [f64; 2]) -> f64 {
    let proj = rect.corners().map(|c| c[0] * dir[0] + c[1] * dir[1]);
    proj.iter().copied().fold(f64::NEG_INFINITY, f64::max) - proj.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Smallest inward distance of `inner`'s corners to the boundary of `outer`;
/// negative when a corner lies outside.
pub fn containment_slack(outer: &OrientedRect, inner: &OrientedRect) -> f64 {
    inner
        .corners()
        .iter()
        .map(|&c| {
            let (s, r) = outer.local(c);
            (outer.length / 2.0 - s.abs()).min(outer.width / 2.0 - r.abs())
        })
        .fold(f64::INFINITY, f64::min)
}

fn inward_distance(rect: &OrientedRect, p: [f64; 2]) -> f64 {
    let (s, r) = rect.local(p);
    (rect.length / 2.0 - s.abs()).min(rect.width / 2.0 - r.abs())
}

/// Checks, for a member `r0` meeting a selected `ri` at the cell `z0`:
/// (i) `φ₀ ≤ φ₁ + φ₂`; (ii) `φ₀ < 2θ ≤ 2W(Rᵢ)/L(Rᵢ)`; (iii) the extents of
/// `R₀` across and along `Rᵢ` are at most `4W(Rᵢ)` and `2L(R₀)`;
/// (iv) `R₀ ⊆ 10·Rᵢ` by the corner test. Angle and extent comparisons allow a
/// relative rounding slack of 1e-12; the class comparison is exact.
pub fn containment_lemma_check(
    field: &FieldSpec,
    theta: f64,
    r0: (usize, &Member),
    ri: (usize, &Member),
    z0: usize,
) -> Result<PairEvidence> {
    let (member, m0) = r0;
    let (selected, mi) = ri;
    let (a, b) = (&m0.rect, &mi.rect);
    let class = WidthRule::Eccentricity { theta };
    if !m0.population.contains_index(z0) || !mi.population.contains_index(z0) {
        return Err(Error::NotApplicable(format!("cell {z0} is not shared by members {member} and {selected}")));
    }
    if a.length > b.length {
        return Err(Error::NotApplicable(format!("member {member} is longer than selected member {selected}")));
    }
    if !class.admits(a) || !class.admits(b) {
        return Err(Error::NotApplicable(format!("pair ({member}, {selected}) leaves the θ = {theta} class")));
    }
    let grid = m0.population.grid();
    let (row, col) = grid.row_col(z0);
    let z = grid.cell_center(row, col);
    let v = field.evaluate(z)?;
    if v == [0.0, 0.0] {
        return Err(Error::UndefinedDirection(z));
    }
    let phi0 = line_angle(a.axis(), b.axis());
    let phi1 = line_angle(v, a.axis());
    let phi2 = line_angle(v, b.axis());
    let two_theta = 2.0 * theta;
    let check_i = phi0 <= (phi1 + phi2) * (1.0 + 1e-12) + 1e-15;
    let class_bound = rational(2.0) * rational(theta) * rational(b.length) <= rational(2.0) * rational(b.width);
    let check_ii = phi0 < two_theta && class_bound;
    let normal_extent = extent_along(a, b.normal());
    let axis_extent = extent_along(a, b.axis());
    let (normal_bound, axis_bound) = (4.0 * b.width, 2.0 * a.length);
    let check_iii =
        normal_extent <= normal_bound * (1.0 + 1e-12) && axis_extent <= axis_bound * (1.0 + 1e-12);
    let dilated = b.dilate(DILATION)?;
    let check_iv = dilated.contains_rect(a);
    let margin = inward_distance(a, z).min(inward_distance(b, z));
    Ok(PairEvidence {
        member,
        selected,
        z0,
        phi0,
        phi1,
        phi2,
        two_theta,
        normal_extent,
        normal_bound,
        axis_extent,
        axis_bound,
        containment_slack: containment_slack(&dilated, a),
        margin,
        near_edge: margin < 2.0 * grid.spacing,
        checks: [check_i, check_ii, check_iii, check_iv],
    })
}

/// The five links of the measure chain, rounded from their exact values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    /// `|K|`
    #[serde(rename = "K")]
    pub k: f64,
    /// `Σ|R'ᵢ|`
    #[serde(rename = "sumRp")]
    pub sum_rp: f64,
    /// `100 Σ|Rᵢ|`
    #[serde(rename = "sumR100")]
    pub sum_r100: f64,
    /// `(100/δ) Σ|V(Rᵢ)|`
    #[serde(rename = "sumV_over_delta")]
    pub sum_v_over_delta: f64,
    /// `(100/δλ) Σ ∫_{V(Rᵢ)} |f|`
    #[serde(rename = "sumF_over_delta_lambda")]
    pub sum_f_over_delta_lambda: f64,
    /// `(100/δλ) ‖f‖₁`
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    pub member: usize,
    pub contained_in: usize,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringCertificate {
    pub config_hash: String,
    pub seed: u64,
    pub delta: f64,
    pub theta: f64,
    pub lambda: f64,
    pub members: usize,
    pub selected: Vec<usize>,
    pub dilations: Vec<OrientedRect>,
    pub chain: Chain,
    pub containment: Vec<Containment>,
    pub pair_evidence: Vec<PairEvidence>,
    /// Pairs whose shared cell lies within `2h` of a rectangle edge.
    pub near_edge_pairs: usize,
}

fn check_link(what: &str, lhs: &BigRational, rhs: &BigRational) -> Result<()> {
    if lhs <= rhs {
        Ok(())
    } else {
        Err(Error::violation(what, to_f64(lhs), to_f64(rhs)))
    }
}

/// Runs the selection, checks the containment lemma for every unselected
/// member against its witness, verifies the cover `K ⊆ ∪ raster(10·Rᵢ)` and
/// the measure chain, all exactly.
pub fn covering_certificate(family: &AdmissibleFamily) -> Result<CoveringCertificate> {
    let members = family.members();
    let grid = *family.grid();
    let Selection { selected, witness } = greedy_disjoint(family);

    let pair_evidence = (0..members.len())
        .into_par_iter()
        .filter(|j| witness[*j] != *j)
        .map(|j| {
            let i = witness[j];
            let z0 = members[j].population.first_common(&members[i].population)?.expect("witness meets member");
            containment_lemma_check(family.field(), family.theta(), (j, &members[j]), (i, &members[i]), z0)
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = pair_evidence.iter().find(|e| !e.passed()) {
        return Err(Error::violation(
            format!("containment lemma for member {} in selected {} (checks {:?})", bad.member, bad.selected, bad.checks),
            bad.normal_extent,
            bad.normal_bound,
        ));
    }

    let dilations = selected.iter().map(|&i| members[i].rect.dilate(DILATION)).collect::<Result<Vec<_>>>()?;
    let containment: Vec<Containment> = (0..members.len())
        .map(|j| {
            let i = witness[j];
            let k = selected.iter().position(|&s| s == i).expect("witness is selected");
            Containment { member: j, contained_in: i, slack: containment_slack(&dilations[k], &members[j].rect) }
        })
        .collect();

    let mut k_mask = RasterMask::empty(grid);
    for m in members {
        k_mask.union_with(&m.population)?;
    }
    let mut cover = RasterMask::empty(grid);
    for d in &dilations {
        cover.union_with(&rasterize(d, &grid))?;
    }
    if !k_mask.is_subset(&cover)? {
        let missing = k_mask.difference(&cover)?.count();
        return Err(Error::violation("cover of K by the 10-fold dilations (uncovered cells)", missing as f64, 0.0));
    }

    let cell = rational(grid.cell_area());
    let hundred = rational(100.0);
    let delta = rational(family.delta());
    let lambda = rational(family.lambda());
    let k = &cell * rational(k_mask.count() as f64);
    let mut sum_r = BigRational::zero();
    let mut sum_v = BigRational::zero();
    let mut sum_f = ExactSum::new();
    for &i in &selected {
        let m = &members[i];
        sum_r += rational(m.rect.length) * rational(m.rect.width);
        sum_v += &cell * rational(m.population.count() as f64);
        for c in m.population.indices() {
            sum_f.add(family.f().values[c].abs());
        }
    }
    let sum_rp = &hundred * &sum_r;
    let sum_r100 = &hundred * &sum_r;
    let sum_v_over_delta = &hundred * &sum_v / &delta;
    let total: ExactSum = family.f().values.iter().map(|v| v.abs()).collect();
    let norm = &cell * total.value();
    check_link("|K| ≤ Σ|R'|", &k, &sum_rp)?;
    check_link("Σ|R'| ≤ 100Σ|R|", &sum_rp, &sum_r100)?;
    check_link("100Σ|R| ≤ (100/δ)Σ|V|", &sum_r100, &sum_v_over_delta)?;
    let scale = &hundred / (&delta * &lambda);
    let sum_f_over = &scale * &cell * sum_f.value();
    check_link("(100/δ)Σ|V| ≤ (100/δλ)Σ∫|f|", &sum_v_over_delta, &sum_f_over)?;
    let bound = &scale * &norm;
    check_link("(100/δλ)Σ∫|f| ≤ (100/δλ)‖f‖₁", &sum_f_over, &bound)?;

    Ok(CoveringCertificate {
        config_hash: String::new(),
        seed: 0,
        delta: family.delta(),
        theta: family.theta(),
        lambda: family.lambda(),
        members: members.len(),
        near_edge_pairs: pair_evidence.iter().filter(|e| e.near_edge).count(),
        selected,
        dilations,
        chain: Chain {
            k: to_f64(&k),
            sum_rp: to_f64(&sum_rp),
            sum_r100: to_f64(&sum_r100),
            sum_v_over_delta: to_f64(&sum_v_over_delta),
            sum_f_over_delta_lambda: to_f64(&sum_f_over),
            bound: to_f64(&bound),
        },
        containment,
        pair_evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{BoxDomain, FieldKind};

    fn unit_setup(direction: [f64; 2]) -> (FieldSpec, GridFunction) {
        let field = FieldSpec::new(FieldKind::Constant(direction), BoxDomain::new([0.0, 0.0], [1.0, 1.0]).unwrap(), "c").unwrap();
        let grid = GridSpec::covering([0.0, 0.0], 1.0, 256).unwrap();
        (field, GridFunction::from_fn(grid, |_| 1.0))
    }

    #[test]
    fn identity_pair_passes_trivially() {
        let (field, f) = unit_setup([1.0, 0.0]);
        let r = OrientedRect::new([0.5, 0.5], 0.0, 0.5, 0.5 * 0.009 * 1.5).unwrap();
        let fam = AdmissibleFamily::new(field, f, vec![r], 0.5, 0.009, 0.5).unwrap();
        let m = &fam.members()[0];
        let z0 = m.population.indices().next().unwrap();
        let e = containment_lemma_check(fam.field(), 0.009, (0, m), (0, m), z0).unwrap();
        assert!(e.passed());
        assert_eq!(e.phi0, 0.0);
        assert!((e.containment_slack - 4.5 * r.width).abs() < 1e-12);
    }

    #[test]
    fn pair_at_one_point_nine_theta() {
        let theta = 0.009;
        let beta = 0.3f64;
        let (field, f) = unit_setup([beta.cos(), beta.sin()]);
        let c = f.grid.cell_center(128, 128);
        let r0 = OrientedRect::new(c, beta - 0.95 * theta, 0.3, 0.3 * 1.95 * theta).unwrap();
        let ri = OrientedRect::new(c, beta + 0.95 * theta, 0.5, 0.5 * 1.95 * theta).unwrap();
        let fam = AdmissibleFamily::new(field, f, vec![r0, ri], 0.5, theta, 0.5).unwrap();
        let [m0, mi] = [&fam.members()[0], &fam.members()[1]];
        let z0 = m0.population.first_common(&mi.population).unwrap().unwrap();
        let e = containment_lemma_check(fam.field(), theta, (0, m0), (1, mi), z0).unwrap();
        assert!((e.phi0 - 1.9 * theta).abs() < 1e-12);
        assert!((e.phi1 - 0.95 * theta).abs() < 1e-12 && (e.phi2 - 0.95 * theta).abs() < 1e-12);
        assert_eq!(e.checks, [true; 4]);
        // the roles cannot be swapped: the lemma needs L₀ ≤ Lᵢ
        assert!(matches!(
            containment_lemma_check(fam.field(), theta, (1, mi), (0, m0), z0),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn unshared_cell_is_not_applicable() {
        let (field, f) = unit_setup([1.0, 0.0]);
        let y = f.grid.cell_center(128, 0)[1];
        let r0 = OrientedRect::new([0.25, y], 0.0, 0.2, 0.2 * 0.0135).unwrap();
        let r1 = OrientedRect::new([0.75, y], 0.0, 0.4, 0.4 * 0.0135).unwrap();
        let fam = AdmissibleFamily::new(field, f, vec![r0, r1], 0.5, 0.009, 0.5).unwrap();
        let z0 = fam.members()[0].population.indices().next().unwrap();
        let err = containment_lemma_check(fam.field(), 0.009, (0, &fam.members()[0]), (1, &fam.members()[1]), z0);
        assert!(matches!(err, Err(Error::NotApplicable(_))));
    }

    #[test]
    fn inadmissible_members_are_rejected_with_index() {
        let (field, f) = unit_setup([1.0, 0.0]);
        let good = OrientedRect::new([0.5, 0.5], 0.0, 0.5, 0.5 * 0.0135).unwrap();
        let fat = OrientedRect::new([0.5, 0.5], 0.0, 0.5, 0.5 * 0.02).unwrap();
        let err = AdmissibleFamily::new(field.clone(), f.clone(), vec![good, fat], 0.5, 0.009, 0.5).unwrap_err();
        assert!(matches!(err, Error::Inadmissible { index: 1, .. }));
        // field perpendicular to the axis: V(R) is empty
        let (perp, _) = unit_setup([0.0, 1.0]);
        let err = AdmissibleFamily::new(perp, f.clone(), vec![good], 0.5, 0.009, 0.5).unwrap_err();
        assert!(matches!(err, Error::Inadmissible { index: 0, .. }));
        // mean equal to λ is not enough
        let err = AdmissibleFamily::new(field, f, vec![good], 0.5, 0.009, 1.0).unwrap_err();
        assert!(matches!(err, Error::Inadmissible { index: 0, .. }));
    }

    #[test]
    fn disjoint_members_are_all_selected_and_copies_once() {
        let (field, f) = unit_setup([1.0, 0.0]);
        let rects: Vec<OrientedRect> =
            (0..8).map(|k| OrientedRect::new([0.5, f.grid.cell_center(20 + 25 * k, 0)[1]], 0.0, 0.5, 0.5 * 0.0135).unwrap()).collect();
        let fam = AdmissibleFamily::new(field.clone(), f.clone(), rects.clone(), 0.5, 0.009, 0.5).unwrap();
        let sel = greedy_disjoint(&fam);
        assert_eq!(sel.selected, (0..8).collect::<Vec<_>>());
        assert!(is_maximal_disjoint(&fam, &sel.selected));

        let fam = AdmissibleFamily::new(field, f, vec![rects[3]; 5], 0.5, 0.009, 0.5).unwrap();
        let sel = greedy_disjoint(&fam);
        assert_eq!(sel.selected, vec![0]);
        assert_eq!(sel.witness, vec![0; 5]);
    }

    #[test]
    fn single_member_certificate() {
        let (field, grid_f) = unit_setup([1.0, 0.0]);
        let f = GridFunction::from_fn(grid_f.grid, |p| if p[0] < 0.5 { 2.0 } else { 0.0 });
        let r = OrientedRect::new([0.5, 0.5], 0.0, 0.5, 0.5 * 0.0135).unwrap();
        let fam = AdmissibleFamily::new(field, f.clone(), vec![r], 0.3, 0.009, 0.5).unwrap();
        let cert = covering_certificate(&fam).unwrap();
        let v = fam.members()[0].population.measure();
        assert_eq!(cert.selected, vec![0]);
        assert_eq!(cert.chain.k, v);
        assert!(cert.chain.k <= 100.0 / 0.3 * v);
        assert!(cert.chain.bound >= 100.0 / (0.3 * 0.5) * f.l1() * (1.0 - 1e-15));
        assert!(cert.pair_evidence.is_empty());
    }

    #[test]
    fn parallel_translates_pack_one_dimensionally() {
        let (field, f) = unit_setup([1.0, 0.0]);
        let h = f.grid.spacing;
        // L = 64h with edges a quarter cell off the centers: each population is
        // exactly 64 cells of one row, shifted 3 cells per member
        let rects: Vec<OrientedRect> = (0..64)
            .map(|k| {
                let left = (3 * k) as f64 * h + 0.25 * h;
                OrientedRect::new([left + 32.0 * h, f.grid.cell_center(128, 0)[1]], 0.0, 64.0 * h, 64.0 * h * 0.0135).unwrap()
            })
            .collect();
        let fam = AdmissibleFamily::new(field, f, rects, 0.5, 0.009, 0.5).unwrap();
        assert!(fam.members().iter().all(|m| m.population.count() == 64));
        // members k, k' overlap iff 3|k - k'| < 64, i.e. |k - k'| ≤ 21
        let cert = covering_certificate(&fam).unwrap();
        assert_eq!(cert.selected, vec![0, 22, 44]);
        for c in &cert.containment {
            let expected = [0, 22, 44].into_iter().find(|&s| (c.member as i64 - s as i64).abs() <= 21).unwrap();
            assert_eq!(c.contained_in, expected);
            assert!(c.slack >= 0.0);
        }
        assert_eq!(cert.pair_evidence.len(), 61);
        assert_eq!(cert.chain.k, (64 + 3 * 63) as f64 * h * h);
    }

    #[test]
    fn level_must_be_positive() {
        let (field, f) = unit_setup([1.0, 0.0]);
        let r = OrientedRect::new([0.5, 0.5], 0.0, 0.5, 0.5 * 0.0135).unwrap();
        assert!(matches!(AdmissibleFamily::new(field, f, vec![r], 0.5, 0.009, 0.0), Err(Error::Parameter(_))));
    }
}
