//! The doubling inequality for `sup w_x` between scales ε and 2ε.

use serde::{Deserialize, Serialize};

use super::angular_profile;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingRecord {
    pub x: Point,
    pub eps: f64,
    pub sup_2eps: f64,
    pub sup_eps: f64,
    pub tau0: f64,
    pub pass: bool,
}

impl DoublingRecord {
    /// `sup_2ε / sup_ε`, conventionally 1 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.sup_2eps == 0.0 && self.sup_eps == 0.0 {
            1.0
        } else {
            self.sup_2eps / self.sup_eps
        }
    }
}

/// `τ₀ = exp(-(2C)^{1/p})`, so that `C (log 1/τ₀)^{-p} = 1/2`.
pub fn doubling_tau0(c: f64, p: f64) -> Result<f64> {
    if !(c > 0.0 && p > 0.0) {
        return Err(Error::Parameter(format!("doubling needs C > 0 and p > 0, got C = {c}, p = {p}")));
    }
    Ok((-(2.0 * c).powf(1.0 / p)).exp())
}

/// Checks `sup_{[-2ε,2ε]} w_x ≤ sup_{[-ε,ε]} w_x / τ₀`. The 2ε profile uses
/// `2·n_t` intervals so its nodes contain those of the ε profile.
pub fn doubling_check(field: &FieldSpec, x: Point, eps: f64, c: f64, p: f64, n_t: usize) -> Result<DoublingRecord> {
    let tau0 = doubling_tau0(c, p)?;
    let inner = angular_profile(field, x, eps, n_t)?;
    let outer = angular_profile(field, x, 2.0 * eps, 2 * n_t)?;
    let (sup_eps, sup_2eps) = (inner.sup_w, outer.sup_w);
    let pass = if sup_eps == 0.0 { sup_2eps == 0.0 } else { sup_2eps <= sup_eps / tau0 };
    Ok(DoublingRecord { x, eps, sup_2eps, sup_eps, tau0, pass })
}
