//! τ-balancing equations, single-scale decay factors and envelope ordering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BalanceRegime {
    /// `exp(-σ (log 1/τ)^{c₁}) = (τ Tδ)^{-2}`
    ExpLog { sigma: f64, c1: f64 },
    /// `(log 1/τ)^{-p} = (τ Tδ)^{-2}`
    LogPoly { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceRoot {
    pub tau: f64,
    /// Left side minus right side of the balancing equation at `tau`.
    pub residual: f64,
    pub iterations: u32,
}

const U_LO: f64 = -690.7755278982137; // ln 1e-300

fn u_hi() -> f64 {
    (1.0f64 - 1e-12).ln()
}

impl BalanceRegime {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            BalanceRegime::ExpLog { sigma, c1 } => sigma > 0.0 && c1 > 0.0,
            BalanceRegime::LogPoly { p } => p > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid balancing exponents {self:?}")))
        }
    }

    /// `log(lhs) - log(rhs)` as a function of `u = log τ < 0`; strictly increasing.
    fn log_gap(&self, u: f64, log_td: f64) -> f64 {
        let envelope = match *self {
            BalanceRegime::ExpLog { sigma, c1 } => -sigma * (-u).powf(c1),
            BalanceRegime::LogPoly { p } => -p * (-u).ln(),
        };
        envelope + 2.0 * (u + log_td)
    }

    pub fn lhs(&self, tau: f64) -> f64 {
        let l = (1.0 / tau).ln();
        match *self {
            BalanceRegime::ExpLog { sigma, c1 } => (-sigma * l.powf(c1)).exp(),
            BalanceRegime::LogPoly { p } => l.powf(-p),
        }
    }

    pub fn rhs(tau: f64, tdelta: f64) -> f64 {
        (tau * tdelta).powi(-2)
    }

    pub fn residual(&self, tau: f64, tdelta: f64) -> f64 {
        self.lhs(tau) - Self::rhs(tau, tdelta)
    }
}

fn check_tdelta(tdelta: f64) -> Result<()> {
    if !(tdelta > 1.0 + 1e-9) || !tdelta.is_finite() {
        return Err(Error::Regime(format!("Tδ = {tdelta} must exceed 1")));
    }
    Ok(())
}

/// Root in `(0, 1)` of the balancing equation, by bisection in `log τ` down
/// to adjacent floating-point values.
pub fn balance_tau(regime: BalanceRegime, tdelta: f64) -> Result<BalanceRoot> {
    regime.validate()?;
    check_tdelta(tdelta)?;
    let log_td = tdelta.ln();
    let (mut lo, mut hi) = (U_LO, u_hi());
    if regime.log_gap(lo, log_td) >= 0.0 || regime.log_gap(hi, log_td) <= 0.0 {
        return Err(Error::NumericalRange);
    }
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if regime.log_gap(mid, log_td) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = [lo.exp(), hi.exp()]
        .into_iter()
        .min_by(|a, b| regime.residual(*a, tdelta).abs().total_cmp(&regime.residual(*b, tdelta).abs()))
        .unwrap();
    Ok(BalanceRoot { tau, residual: regime.residual(tau, tdelta), iterations })
}

/// Number of sign changes of the balancing gap over `samples` equispaced
/// values of `log τ` in `(log 1e-300, log(1 - 1e-12))`. A unique root shows
/// exactly one.
pub fn balance_sign_changes(regime: BalanceRegime, tdelta: f64, samples: usize) -> Result<usize> {
    regime.validate()?;
    check_tdelta(tdelta)?;
    if samples < 2 {
        return Err(Error::Parameter("need at least two samples".into()));
    }
    let log_td = tdelta.ln();
    let (lo, hi) = (U_LO, u_hi());
    let signs: Vec<bool> = (0..samples)
        .map(|k| regime.log_gap(lo + (hi - lo) * k as f64 / (samples - 1) as f64, log_td) >= 0.0)
        .collect();
    Ok(signs.windows(2).filter(|w| w[0] != w[1]).count())
}

/// Single-scale decay factor of a regime with caller-supplied constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FactorRegime {
    /// `exp(-σ' (log Tδ)^{c₁})`
    ExpLog { sigma_prime: f64, c1: f64 },
    /// `(log C Tδ)^{-p}`
    LogPoly { p: f64, c: f64 },
}

pub fn bound_factor(regime: FactorRegime, tdelta: f64) -> Result<f64> {
    if !(tdelta > 1.0) {
        return Err(Error::Regime(format!("Tδ = {tdelta} must exceed 1")));
    }
    match regime {
        FactorRegime::ExpLog { sigma_prime, c1 } => Ok((-sigma_prime * tdelta.ln().powf(c1)).exp()),
        FactorRegime::LogPoly { p, c } => {
            let l = (c * tdelta).ln();
            if !(l > 0.0) {
                return Err(Error::Parameter(format!("log(C·Tδ) = {l} is not positive")));
            }
            Ok(l.powf(-p))
        }
    }
}

/// Threshold `τ*` such that `τ^{c₀} ≤ exp(-σ(log 1/τ)^{c₁}) ≤ (log 1/τ)^{-p}`
/// for every `τ < τ*`.
pub fn envelope_ordering_threshold(c0: f64, sigma: f64, c1: f64, p: f64) -> Result<f64> {
    Ok((-envelope_ordering_log_threshold(c0, sigma, c1, p)?).exp())
}

/// `log(1/τ*)` for [`envelope_ordering_threshold`]; stays finite when `τ*` underflows.
pub fn envelope_ordering_log_threshold(c0: f64, sigma: f64, c1: f64, p: f64) -> Result<f64> {
    if !(c0 > 0.0 && sigma > 0.0 && c1 > 0.0 && p > 0.0) {
        return Err(Error::Parameter("ordering exponents must be positive".into()));
    }
    if c1 > 1.0 {
        return Err(Error::NotApplicable(format!(
            "c₁ = {c1} > 1: the exponential-log envelope decays faster than any power"
        )));
    }
    // power vs explog: c₀ L ≥ σ L^{c₁}
    let l1 = if c1 == 1.0 {
        if sigma > c0 {
            return Err(Error::NotApplicable(format!("c₁ = 1 with σ = {sigma} > c₀ = {c0}")));
        }
        0.0
    } else {
        (sigma / c0).powf(1.0 / (1.0 - c1))
    };
    // explog vs logpoly: f(L) = σ L^{c₁} - p ln L ≥ 0
    let f = |l: f64| sigma * l.powf(c1) - p * l.ln();
    let lm = (p / (sigma * c1)).powf(1.0 / c1);
    let l2 = if f(lm) >= 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (lm, 2.0 * lm);
        while f(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NumericalRange);
            }
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    Ok(l1.max(l2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // 10τ = log(1/τ), solved to 20 digits in arbitrary precision
    const TAU2_ORACLE: f64 = 0.174_552_800_274_069_94;

    #[test]
    fn logpoly_root_matches_oracle() {
        let r = balance_tau(BalanceRegime::LogPoly { p: 2.0 }, 10.0).unwrap();
        assert!((r.tau - TAU2_ORACLE).abs() < 1e-10, "{}", r.tau);
        assert!(r.residual.abs() < 1e-12);
        let t = r.tau;
        assert!((t * t * 100.0 - (1.0 / t).ln().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn explog_unit_exponents_closed_form() {
        for k in 1..=3 {
            let td = (k as f64).exp();
            let r = balance_tau(BalanceRegime::ExpLog { sigma: 1.0, c1: 1.0 }, td).unwrap();
            assert!((r.tau - td.powf(-2.0 / 3.0)).abs() < 1e-10);
            assert!(r.residual.abs() < 1e-12);
        }
    }

    #[test]
    fn tdelta_must_exceed_one() {
        let reg = BalanceRegime::LogPoly { p: 2.0 };
        assert!(matches!(balance_tau(reg, 1.0), Err(Error::Regime(_))));
        assert!(matches!(balance_tau(reg, 0.5), Err(Error::Regime(_))));
    }

    #[test]
    fn bound_factor_examples() {
        let e = std::f64::consts::E;
        assert!((bound_factor(FactorRegime::LogPoly { p: 2.0, c: 1.0 }, e).unwrap() - 1.0).abs() < 1e-15);
        assert!((bound_factor(FactorRegime::LogPoly { p: 2.0, c: 1.0 }, e * e).unwrap() - 0.25).abs() < 1e-15);
        let v = bound_factor(FactorRegime::ExpLog { sigma_prime: 1.0, c1: 0.5 }, 4.0f64.exp()).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-15);
        assert!(bound_factor(FactorRegime::LogPoly { p: 2.0, c: 0.1 }, 2.0).is_err());
    }

    #[test]
    fn ordering_threshold_rejects_fast_explog() {
        assert!(envelope_ordering_threshold(1.0, 1.0, 1.5, 2.0).is_err());
        assert!(envelope_ordering_threshold(1.0, 2.0, 1.0, 2.0).is_err());
        assert!(envelope_ordering_threshold(1.0, 0.5, 1.0, 2.0).is_ok());
    }

    proptest! {
        #[test]
        fn balance_root_is_unique_and_tight(
            td in 1.01f64..1e8,
            p in 0.5f64..4.0,
            sigma in 0.1f64..3.0,
            c1 in 0.1f64..1.5,
        ) {
            for reg in [BalanceRegime::LogPoly { p }, BalanceRegime::ExpLog { sigma, c1 }] {
                let r = balance_tau(reg, td).unwrap();
                prop_assert!(r.tau > 0.0 && r.tau < 1.0);
                prop_assert!(r.residual.abs() < 1e-12, "{:?} {}", reg, r.residual);
                prop_assert_eq!(balance_sign_changes(reg, td, 4096).unwrap(), 1);
            }
        }

        #[test]
        fn envelopes_are_ordered_below_threshold(
            c0 in 0.2f64..3.0,
            sigma in 0.1f64..3.0,
            c1 in 0.1f64..0.95,
            p in 0.5f64..4.0,
            k in 1.01f64..100.0,
        ) {
            let lstar = envelope_ordering_log_threshold(c0, sigma, c1, p).unwrap();
            // compare logarithms at L = k·log(1/τ*) so tiny thresholds stay representable
            let l = k * lstar.max(1e-3);
            let power = -c0 * l;
            let explog = -sigma * l.powf(c1);
            let logpoly = -p * l.ln();
            prop_assert!(power <= explog, "{} {}", power, explog);
            prop_assert!(explog <= logpoly, "{} {}", explog, logpoly);
        }
    }
}
