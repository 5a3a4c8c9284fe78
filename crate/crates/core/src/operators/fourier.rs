use num_rational::BigRational;
use num_traits::Zero;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{average_a, GridFunction};
use crate::angular::{bound_factor, FactorRegime};
use crate::error::{Error, Result};
use crate::exact::{rational, to_f64};
use crate::field::FieldSpec;
use crate::geometry::{rasterize, BourgainRect, GridSpec, RasterMask};

fn check_pow2(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::UnsupportedSize(n));
    }
    Ok(())
}

/// Unnormalized 2-D DFT in place (rows, then columns).
fn fft2(data: &mut [Complex<f64>], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    fft.process(data);
    let mut col = vec![Complex::zero(); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = data[r * n + c];
        }
        fft.process(&mut col);
        for r in 0..n {
            data[r * n + c] = col[r];
        }
    }
}

fn spectrum(f: &GridFunction) -> Vec<Complex<f64>> {
    let mut data: Vec<Complex<f64>> = f.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft2(&mut data, f.grid.n, false);
    data
}

fn real_inverse(mut data: Vec<Complex<f64>>, grid: GridSpec) -> GridFunction {
    let n = grid.n;
    fft2(&mut data, n, true);
    let scale = 1.0 / (n * n) as f64;
    GridFunction { grid, values: data.iter().map(|z| z.re * scale).collect() }
}

/// Signed integer frequency of DFT index `i`, in `(-n/2, n/2]`.
pub fn signed_frequency(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Band of lattice frequency `k`: `None` for `k = 0`, else the `m` with
/// `4^m ≤ |k|² < 4^{m+1}`, i.e. `T = 2^m ≤ |k| < 2T`.
pub fn band_index(k1: i64, k2: i64) -> Option<u32> {
    let r2 = (k1 * k1 + k2 * k2) as u64;
    if r2 == 0 {
        return None;
    }
    Some((63 - r2.leading_zeros()) / 2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandDecomposition {
    /// Zero-frequency part (the mean).
    pub dc: GridFunction,
    /// `(T, f_T)` for `T = 1, 2, 4, …, n/2`.
    pub bands: Vec<(u64, GridFunction)>,
}

impl BandDecomposition {
    pub fn reconstruct(&self) -> GridFunction {
        let mut out = self.dc.clone();
        for (_, b) in &self.bands {
            for (o, v) in out.values.iter_mut().zip(&b.values) {
                *o += v;
            }
        }
        out
    }

    pub fn band(&self, t: u64) -> Option<&GridFunction> {
        self.bands.iter().find(|(tt, _)| *tt == t).map(|(_, b)| b)
    }
}

/// Sharp dyadic-annulus decomposition on the integer frequency lattice of a
/// `2^k × 2^k` periodic grid.
pub fn lp_decompose(f: &GridFunction) -> Result<BandDecomposition> {
    let n = f.grid.n;
    check_pow2(n)?;
    let spec = spectrum(f);
    let n_bands = n.trailing_zeros(); // T = 2^0 .. 2^{log2 n - 1} = n/2
    let mut parts = vec![vec![Complex::zero(); n * n]; n_bands as usize + 1];
    for r in 0..n {
        for c in 0..n {
            let i = r * n + c;
            let slot = match band_index(signed_frequency(r, n), signed_frequency(c, n)) {
                None => 0,
                Some(m) => m as usize + 1,
            };
            parts[slot][i] = spec[i];
        }
    }
    let mut it = parts.into_iter().map(|p| real_inverse(p, f.grid));
    let dc = it.next().expect("dc slot");
    let bands = it.enumerate().map(|(m, b)| (1u64 << m, b)).collect();
    Ok(BandDecomposition { dc, bands })
}

/// Smooth radial bump `exp(1 - 1/(1 - r²))` on `r < 1`, equal to 1 at the origin.
pub fn bump(r: f64) -> f64 {
    if r < 1.0 {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// Fourier multiplier of `ψ_{1/T}` on the DFT lattice, at physical frequency `ξ = k/(n h)`.
pub fn cutoff_multiplier(grid: &GridSpec, t: f64) -> Vec<f64> {
    let n = grid.n;
    let unit = 1.0 / (n as f64 * grid.spacing);
    (0..n * n)
        .map(|i| {
            let (r, c) = (i / n, i % n);
            let xi = unit * ((signed_frequency(r, n).pow(2) + signed_frequency(c, n).pow(2)) as f64).sqrt();
            bump(xi / t)
        })
        .collect()
}

/// Periodic convolution `χ_mask * ψ_{1/T}`.
pub fn mollified_cutoff(mask: &RasterMask, t: f64) -> Result<GridFunction> {
    if !(t >= 1.0) {
        return Err(Error::Parameter(format!("cutoff frequency T = {t} must be at least 1")));
    }
    let grid = *mask.grid();
    check_pow2(grid.n)?;
    let mut spec = spectrum(&GridFunction::indicator(mask));
    for (z, m) in spec.iter_mut().zip(cutoff_multiplier(&grid, t)) {
        *z *= m;
    }
    Ok(real_inverse(spec, grid))
}

/// Weight sequence over the scale offset `j ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScaleWeights {
    /// `j^{-p}`
    LogPoly { p: f64 },
    /// `exp(-σ j^{c₁})`
    ExpLog { sigma: f64, c1: f64 },
}

impl ScaleWeights {
    pub fn weight(&self, j: u32) -> f64 {
        match *self {
            ScaleWeights::LogPoly { p } => (j as f64).powf(-p),
            ScaleWeights::ExpLog { sigma, c1 } => (-sigma * (j as f64).powf(c1)).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSumRecord {
    pub j_max: u32,
    pub s_min: i32,
    pub s_max: i32,
    /// `Σ_j w_j Σ_s ‖f_{2^{s+j}}‖²`
    pub lhs: f64,
    /// `Σ_{j ≤ J} w_j`
    pub constant: f64,
    /// `‖f‖²` as the sum of the band energies
    pub energy: f64,
    pub rhs: f64,
}

/// Checks `Σ_{j=1}^{J} w_j Σ_s ‖f_{2^{s+j}}‖² ≤ (Σ_j w_j)·‖f‖²` in exact
/// rational arithmetic over the band energies.
pub fn scale_sum_audit(f: &GridFunction, weights: ScaleWeights, j_max: u32, s_min: i32, s_max: i32) -> Result<ScaleSumRecord> {
    match weights {
        ScaleWeights::LogPoly { p } if p <= 1.0 => {
            return Err(Error::Divergent(format!("Σ j^-{p} diverges for p ≤ 1")));
        }
        ScaleWeights::ExpLog { sigma, c1 } if !(sigma > 0.0 && c1 > 0.0) => {
            return Err(Error::Divergent(format!("exp(-{sigma} j^{c1}) is not summable")));
        }
        _ => {}
    }
    if j_max == 0 || s_min > s_max {
        return Err(Error::Parameter("empty j or s range".into()));
    }
    let dec = lp_decompose(f)?;
    let energies: Vec<(u64, BigRational)> = dec.bands.iter().map(|(t, b)| (*t, rational(b.l2_squared()))).collect();
    let energy_of = |t_log: i64| -> BigRational {
        if t_log < 0 || t_log >= 63 {
            return BigRational::zero();
        }
        energies.iter().find(|(t, _)| *t == 1u64 << t_log).map(|(_, e)| e.clone()).unwrap_or_else(BigRational::zero)
    };
    let mut lhs = BigRational::zero();
    let mut constant = BigRational::zero();
    for j in 1..=j_max {
        let w = rational(weights.weight(j));
        let mut inner = BigRational::zero();
        for s in s_min..=s_max {
            inner += energy_of(s as i64 + j as i64);
        }
        lhs += &w * inner;
        constant += w;
    }
    let total = energies.iter().fold(rational(dec.dc.l2_squared()), |acc, (_, e)| acc + e);
    let rhs = &constant * &total;
    let record = ScaleSumRecord {
        j_max,
        s_min,
        s_max,
        lhs: to_f64(&lhs),
        constant: to_f64(&constant),
        energy: to_f64(&total),
        rhs: to_f64(&rhs),
    };
    if lhs > rhs {
        return Err(Error::violation("weighted scale sum", record.lhs, record.rhs));
    }
    Ok(record)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleScaleRecord {
    pub t: f64,
    pub t_delta: f64,
    /// `‖A_ε f_T‖₂` over the raster of `R`
    pub lhs: f64,
    pub factor: f64,
    /// `‖f_T · (χ_{R'} * ψ_{1/T})‖₂`
    pub rhs_core: f64,
    pub ratio: f64,
}

/// Measurement of one single-scale estimate; `None` for a degenerate rectangle.
pub fn single_scale_audit(
    field: &FieldSpec,
    band: &GridFunction,
    rect: &BourgainRect,
    t: f64,
    regime: FactorRegime,
    n_t: usize,
) -> Result<Option<SingleScaleRecord>> {
    let (Some(r), Some(doubled)) = (rect.rect(), rect.doubled()) else {
        log::info!("single-scale audit skipped: degenerate rectangle at ({}, {})", rect.base[0], rect.base[1]);
        return Ok(None);
    };
    let t_delta = t * rect.delta;
    if !(t_delta > 1.0) {
        return Err(Error::Regime(format!("Tδ = {t_delta} is not above 1")));
    }
    let grid = band.grid;
    let cells = rasterize(&r, &grid);
    let mut acc = 0.0;
    for i in cells.indices() {
        let (row, col) = grid.row_col(i);
        let a = average_a(field, band, grid.cell_center(row, col), rect.eps, n_t)?;
        acc += a * a;
    }
    let lhs = (grid.cell_area() * acc).sqrt();
    let factor = bound_factor(regime, t_delta)?;
    let cutoff = mollified_cutoff(&rasterize(&doubled, &grid), t)?;
    let rhs_core = band.zip_map(&cutoff, |a, b| a * b)?.l2();
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / (factor * rhs_core) };
    Ok(Some(SingleScaleRecord { t, t_delta, lhs, factor, rhs_core, ratio }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{BoxDomain, FieldKind};
    use crate::geometry::{bourgain_rectangle, OrientedRect};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_f(n: usize, seed: u64) -> GridFunction {
        let grid = GridSpec::covering([0.0, 0.0], 1.0, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridFunction::new(grid, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn band_index_by_lattice_radius() {
        assert_eq!(band_index(0, 0), None);
        assert_eq!(band_index(1, 0), Some(0));
        assert_eq!(band_index(1, 1), Some(0)); // |k| = √2 < 2
        assert_eq!(band_index(3, 0), Some(1));
        assert_eq!(band_index(0, -4), Some(2));
        assert_eq!(band_index(2, 3), Some(1)); // |k|² = 13 < 16
        for k1 in -40i64..=40 {
            for k2 in -40i64..=40 {
                if let Some(m) = band_index(k1, k2) {
                    let r2 = k1 * k1 + k2 * k2;
                    assert!(4i64.pow(m) <= r2 && r2 < 4i64.pow(m + 1));
                }
            }
        }
    }

    #[test]
    fn non_power_of_two_is_rejected() {
        let f = GridFunction::zeros(GridSpec::covering([0.0, 0.0], 1.0, 48).unwrap());
        assert!(matches!(lp_decompose(&f), Err(Error::UnsupportedSize(48))));
    }

    #[test]
    fn single_mode_lives_in_one_band() {
        let n = 32;
        let grid = GridSpec::covering([0.0, 0.0], 1.0, n).unwrap();
        let f = GridFunction::new(grid, (0..n * n).map(|i| (2.0 * PI * 3.0 * (i % n) as f64 / n as f64).cos()).collect()).unwrap();
        let dec = lp_decompose(&f).unwrap();
        for (t, b) in &dec.bands {
            let expected = if *t == 2 { f.linf() } else { 0.0 };
            assert!((b.linf() - expected).abs() < 1e-12, "T = {t}");
        }
        assert!(dec.dc.linf() < 1e-12);
    }

    #[test]
    fn constant_is_dc_only() {
        let f = GridFunction::from_fn(GridSpec::covering([0.0, 0.0], 1.0, 16).unwrap(), |_| 2.5);
        let dec = lp_decompose(&f).unwrap();
        assert!(dec.dc.values.iter().all(|v| (v - 2.5).abs() < 1e-12));
        assert!(dec.bands.iter().all(|(_, b)| b.linf() < 1e-12));
        assert_eq!(dec.bands.iter().map(|(t, _)| *t).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
    }

    #[test]
    fn reconstruction_and_plancherel() {
        let f = random_f(64, 9);
        let dec = lp_decompose(&f).unwrap();
        let rec = dec.reconstruct();
        let err = rec.values.iter().zip(&f.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10);
        let parts = dec.dc.l2_squared() + dec.bands.iter().map(|(_, b)| b.l2_squared()).sum::<f64>();
        assert!((parts / f.l2_squared() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn full_mask_cutoff_is_one() {
        let grid = GridSpec::covering([0.0, 0.0], 1.0, 32).unwrap();
        let out = mollified_cutoff(&RasterMask::full(grid), 4.0).unwrap();
        assert!(out.values.iter().all(|v| (v - 1.0).abs() < 1e-10));
        assert!(mollified_cutoff(&RasterMask::full(grid), 0.5).is_err());
    }

    #[test]
    fn cutoff_is_band_limited() {
        let grid = GridSpec::covering([0.0, 0.0], 1.0, 64).unwrap();
        let r = OrientedRect::new([0.5, 0.5], 0.3, 0.5, 0.1).unwrap();
        let t = 10.0;
        let out = mollified_cutoff(&rasterize(&r, &grid), t).unwrap();
        let spec = spectrum(&out);
        let mask_spec = spectrum(&GridFunction::indicator(&rasterize(&r, &grid)));
        let scale = spec.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for ((z, m), w) in spec.iter().zip(&mask_spec).zip(cutoff_multiplier(&grid, t)) {
            if w == 0.0 || m.norm() == 0.0 {
                assert!(z.norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn cutoff_concentrates_inside_wide_rectangles() {
        let grid = GridSpec::covering([0.0, 0.0], 1.0, 256).unwrap();
        let r = OrientedRect::new([0.5, 0.5], 0.4, 0.6, 0.2).unwrap();
        for t in [40.0, 80.0] {
            assert!(t * r.width >= 8.0);
            let out = mollified_cutoff(&rasterize(&r, &grid), t).unwrap();
            let (row, col) = grid.cell_of(r.center).unwrap();
            assert!(out.get(row, col) >= 0.9, "T = {t}: {}", out.get(row, col));
        }
    }

    #[test]
    fn scale_sum_holds_and_p_one_diverges() {
        let f = random_f(64, 4);
        let rec = scale_sum_audit(&f, ScaleWeights::LogPoly { p: 2.0 }, 40, -5, 10).unwrap();
        assert!(rec.lhs <= rec.rhs);
        assert!(rec.constant < PI * PI / 6.0 && PI * PI / 6.0 - rec.constant < 1.0 / 40.0);
        assert!(matches!(scale_sum_audit(&f, ScaleWeights::LogPoly { p: 1.0 }, 40, 0, 4), Err(Error::Divergent(_))));
        assert!(scale_sum_audit(&f, ScaleWeights::ExpLog { sigma: 1.0, c1: 0.5 }, 20, -3, 3).is_ok());
    }

    #[test]
    fn single_scale_measurement() {
        let domain = BoxDomain::square(2.0);
        let field = FieldSpec::new(FieldKind::Rotation, domain, "rotation").unwrap();
        let grid = GridSpec::covering([-2.0, -2.0], 4.0, 128).unwrap();
        // δ = ε²|x|, so Tδ = |x| > 1 at ε = 2⁻⁴, T = 2⁸
        let rect = bourgain_rectangle(&field, [1.5, 0.5], 0.0625, 64).unwrap();
        let t = 256.0;
        let zero = GridFunction::zeros(grid);
        let regime = FactorRegime::LogPoly { p: 2.0, c: 1.0 };
        let rec = single_scale_audit(&field, &zero, &rect, t, regime, 64).unwrap().unwrap();
        assert_eq!((rec.lhs, rec.ratio), (0.0, 0.0));

        let dec = lp_decompose(&random_f(128, 2)).unwrap();
        // same values on the field's grid
        let band = GridFunction { grid, values: dec.band(16).unwrap().values.clone() };
        let a = single_scale_audit(&field, &band, &rect, t, regime, 64).unwrap().unwrap();
        let b = single_scale_audit(&field, &band, &rect, t, regime, 64).unwrap().unwrap();
        assert!(a.ratio.is_finite());
        assert_eq!(a.ratio.to_bits(), b.ratio.to_bits());

        let c = FieldSpec::new(FieldKind::Constant([1.0, 0.0]), domain, "c").unwrap();
        let flat = bourgain_rectangle(&c, [0.0, 0.0], 0.0625, 64).unwrap();
        assert!(single_scale_audit(&c, &band, &flat, t, regime, 64).unwrap().is_none());
    }
}
