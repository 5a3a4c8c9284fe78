//! Splitting of the averaged kernel `(1 + a w)^{-2}` at a sublevel threshold.

use serde::{Deserialize, Serialize};

use super::{AngularProfile, TauGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSplitRow {
    pub tau: f64,
    pub lhs: f64,
    pub term1: f64,
    pub term2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSplitRecord {
    /// `a = εT / |v(x₀)|`
    pub a: f64,
    pub rows: Vec<KernelSplitRow>,
}

/// For each τ: `lhs = ∫(1 + a w)^{-2}`, `term1 = μ{w < τ sup w}` and
/// `term2 = ε (aτ sup w)^{-2}`, all on the trapezoid measure. Fails on the
/// first τ where `lhs > term1 + term2`.
pub fn kernel_split_audit(profile: &AngularProfile, t: f64, v0_norm: f64, tau_grid: &TauGrid) -> Result<KernelSplitRecord> {
    if !(v0_norm > 0.0 && t > 0.0) {
        return Err(Error::Parameter(format!("T = {t} and |v(x₀)| = {v0_norm} must be positive")));
    }
    let eps = profile.eps;
    let a = eps * t / v0_norm;
    if !(a * profile.sup_w > 1.0) {
        return Err(Error::Regime(format!("Tδ = {} is not above 1", a * profile.sup_w)));
    }
    let lhs: f64 = profile.w_values.iter().zip(profile.weights()).map(|(w, mu)| mu * (1.0 + a * w).powi(-2)).sum();
    let curve = profile.sublevel_curve()?;
    let mut rows = Vec::with_capacity(tau_grid.count);
    for tau in tau_grid.points() {
        let term1 = curve.measure_of(tau);
        let term2 = eps * (a * tau * profile.sup_w).powi(-2);
        if lhs > term1 + term2 {
            return Err(Error::violation(format!("kernel split at τ = {tau:e}"), lhs, term1 + term2));
        }
        rows.push(KernelSplitRow { tau, lhs, term1, term2 });
    }
    Ok(KernelSplitRecord { a, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(tau: f64) -> TauGrid {
        TauGrid { lo: tau, hi: tau, count: 1 }
    }

    #[test]
    fn abs_t_example() {
        let p = AngularProfile::from_fn(1.0, 1 << 14, f64::abs).unwrap();
        let rec = kernel_split_audit(&p, 10.0, 1.0, &single(0.1)).unwrap();
        let row = rec.rows[0];
        assert_eq!(rec.a, 10.0);
        assert!((row.lhs - 2.0 / 11.0).abs() < 1e-6, "{}", row.lhs);
        assert!((row.term1 - 0.2).abs() <= 2.0 * p.step());
        assert!((row.term2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_profile_example() {
        let p = AngularProfile::from_fn(1.0, 64, |_| 1.0).unwrap();
        let grid = TauGrid { lo: 1e-9, hi: 0.7, count: 64 };
        let rec = kernel_split_audit(&p, 100.0, 1.0, &grid).unwrap();
        for row in &rec.rows {
            assert!((row.lhs - 2.0 / 101.0f64.powi(2)).abs() < 1e-15);
            assert_eq!(row.term1, 0.0);
        }
    }

    #[test]
    fn split_can_fail_when_the_sublevel_set_is_empty() {
        // off the sublevel set the integrand is only bounded by (aτ sup)^{-2} on a set of measure 2ε
        let p = AngularProfile::from_fn(1.0, 64, |_| 1.0).unwrap();
        let err = kernel_split_audit(&p, 100.0, 1.0, &single(0.9)).unwrap_err();
        assert!(matches!(err, Error::Violation { .. }));
    }

    #[test]
    fn regime_is_enforced() {
        let p = AngularProfile::from_fn(1.0, 64, f64::abs).unwrap();
        assert!(matches!(kernel_split_audit(&p, 0.5, 1.0, &TauGrid::default()), Err(Error::Regime(_))));
    }
}
