//! Sublevel decay audits and their integral equivalents.

use serde::{Deserialize, Serialize};

use super::AngularProfile;
use crate::error::{Error, Result};
use crate::field::Point;

/// Log-spaced τ samples on `[lo, hi]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for TauGrid {
    fn default() -> Self {
        Self { lo: 1e-9, hi: 1.0 - 1e-6, count: 64 }
    }
}

impl TauGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let last = self.count - 1;
        (0..self.count)
            .map(|k| match k {
                0 => self.lo,
                k if k == last => self.hi,
                k => (a + (b - a) * k as f64 / last as f64).exp(),
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi <= 1.0 - 1e-6) {
            return Err(Error::Parameter(format!("τ grid [{}, {}] must lie in (0, 1 - 1e-6]", self.lo, self.hi)));
        }
        if self.count < 32 {
            return Err(Error::Parameter(format!("τ grid needs ≥ 32 points, got {}", self.count)));
        }
        Ok(())
    }
}

/// Decay shape of a sublevel condition `μ{w < τ sup w} ≤ C·envelope(τ)·ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecayKind {
    /// `τ^{c₀}`
    Power { c0: f64 },
    /// `exp(-σ (log 1/τ)^{c₁})`
    ExpLog { sigma: f64, c1: f64 },
    /// `(log 1/τ)^{-p}`
    LogPoly { p: f64 },
    /// `(ℓ₀ ℓ₁ ⋯ ℓ_{d-1})^{-1} ℓ_d^{-p}` with `ℓ₀ = log 1/τ`, `ℓ_{k+1} = log ℓ_k`.
    IterLog { p: f64, depth: u32 },
}

impl DecayKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecayKind::Power { .. } => "power",
            DecayKind::ExpLog { .. } => "explog",
            DecayKind::LogPoly { .. } => "logpoly",
            DecayKind::IterLog { .. } => "iterlog",
        }
    }

    pub fn exponents(&self) -> Vec<(&'static str, f64)> {
        match *self {
            DecayKind::Power { c0 } => vec![("c0", c0)],
            DecayKind::ExpLog { sigma, c1 } => vec![("sigma", sigma), ("c1", c1)],
            DecayKind::LogPoly { p } => vec![("p", p)],
            DecayKind::IterLog { p, depth } => vec![("p", p), ("depth", depth as f64)],
        }
    }

    /// Envelope value, or `None` where an iterated logarithm is not positive.
    pub fn envelope(&self, tau: f64) -> Option<f64> {
        let l = (1.0 / tau).ln();
        match *self {
            DecayKind::Power { c0 } => Some(tau.powf(c0)),
            DecayKind::ExpLog { sigma, c1 } => Some((-sigma * l.powf(c1)).exp()),
            DecayKind::LogPoly { p } => Some(l.powf(-p)),
            DecayKind::IterLog { p, depth } => {
                let mut prefix = 1.0;
                let mut cur = l;
                for _ in 0..depth {
                    if !(cur > 0.0) {
                        return None;
                    }
                    prefix *= cur;
                    cur = cur.ln();
                }
                if !(cur > 0.0) {
                    return None;
                }
                Some(1.0 / (prefix * cur.powf(p)))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            DecayKind::Power { c0 } => c0 > 0.0,
            DecayKind::ExpLog { sigma, c1 } => sigma > 0.0 && c1 > 0.0,
            DecayKind::LogPoly { p } => p > 0.0,
            DecayKind::IterLog { p, depth } => p > 0.0 && depth >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid decay exponents {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: Point,
    pub eps: f64,
    pub tau: f64,
    pub measure: f64,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Point,
    pub eps: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub kind: DecayKind,
    pub c_min: f64,
    pub witnesses: Vec<Witness>,
    pub tau_grid: TauGrid,
}

/// Per-(profile, τ) ratios `measure / (envelope·ε)`. τ points where the
/// envelope is undefined are omitted.
pub fn decay_sweep(profiles: &[AngularProfile], kind: DecayKind, tau_grid: &TauGrid) -> Result<Vec<SweepRow>> {
    kind.validate()?;
    tau_grid.validate()?;
    let taus = tau_grid.points();
    let mut rows = Vec::with_capacity(profiles.len() * taus.len());
    for (index, profile) in profiles.iter().enumerate() {
        if profile.is_degenerate() {
            return Err(Error::DegenerateProfileAt { index });
        }
        let curve = profile.sublevel_curve()?;
        for &tau in &taus {
            let Some(envelope) = kind.envelope(tau) else { continue };
            let measure = curve.measure_of(tau);
            rows.push(SweepRow { x: profile.x, eps: profile.eps, tau, measure, envelope, ratio: measure / (envelope * profile.eps) });
        }
    }
    Ok(rows)
}

/// Smallest constant making the sublevel condition hold on every audited
/// (profile, τ) pair, together with the pairs that attain it.
pub fn fit_decay_constant(profiles: &[AngularProfile], kind: DecayKind, tau_grid: &TauGrid) -> Result<DecayReport> {
    let rows = decay_sweep(profiles, kind, tau_grid)?;
    let c_min = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let witnesses = if c_min > 0.0 {
        rows.iter().filter(|r| r.ratio == c_min).map(|r| Witness { x: r.x, eps: r.eps, tau: r.tau }).collect()
    } else {
        Vec::new()
    };
    Ok(DecayReport { kind, c_min, witnesses, tau_grid: *tau_grid })
}

/// Integrand family of the integral conditions, as a function of `r = w / sup w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IntegralKind {
    /// `r^{-σ}`
    Power { sigma: f64 },
    /// `exp(σ (-log r)^{c₁})`
    ExpLog { sigma: f64, c1: f64 },
    /// `(-log r)^q`
    LogPoly { q: f64 },
}

impl IntegralKind {
    pub fn integrand(&self, r: f64) -> f64 {
        let l = -r.ln();
        match *self {
            IntegralKind::Power { sigma } => r.powf(-sigma),
            IntegralKind::ExpLog { sigma, c1 } => (sigma * l.powf(c1)).exp(),
            IntegralKind::LogPoly { q } => l.powf(q),
        }
    }

    /// Chebyshev envelope `1 / integrand(τ)`.
    pub fn envelope(&self, tau: f64) -> f64 {
        let l = (1.0 / tau).ln();
        match *self {
            IntegralKind::Power { sigma } => tau.powf(sigma),
            IntegralKind::ExpLog { sigma, c1 } => (-sigma * l.powf(c1)).exp(),
            IntegralKind::LogPoly { q } => l.powf(-q),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum IntegralValue {
    Finite(f64),
    Divergent,
}

impl IntegralValue {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            IntegralValue::Finite(v) => Some(v),
            IntegralValue::Divergent => None,
        }
    }
}

/// Normalized quadrature `(1/2ε) ∫ integrand(w/sup w) dt` on the punctured
/// trapezoid measure. A vanishing sample anywhere off `t = 0` makes the
/// integrand infinite and the value divergent.
pub fn integral_condition(profile: &AngularProfile, kind: IntegralKind) -> Result<IntegralValue> {
    if profile.is_degenerate() {
        return Err(Error::DegenerateProfile);
    }
    let weights = profile.punctured_weights();
    let mut acc = 0.0;
    for (w, mu) in profile.w_values.iter().zip(&weights) {
        if *mu == 0.0 {
            continue;
        }
        if *w == 0.0 {
            return Ok(IntegralValue::Divergent);
        }
        acc += mu * kind.integrand(w / profile.sup_w);
    }
    let value = acc / (2.0 * profile.eps);
    Ok(if value.is_finite() { IntegralValue::Finite(value) } else { IntegralValue::Divergent })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovRecord {
    /// `(τ, punctured sublevel measure, 2εA·envelope(τ))`
    pub rows: Vec<(f64, f64, f64)>,
}

/// Chebyshev direction: a finite integral value `a` forces
/// `μ{w < τ sup w} ≤ 2ε·a·envelope(τ)` at every τ, with no tolerance.
pub fn markov_transfer(profile: &AngularProfile, kind: IntegralKind, a: f64, tau_grid: &TauGrid) -> Result<MarkovRecord> {
    if !a.is_finite() {
        return Err(Error::Parameter("integral value must be finite".into()));
    }
    let curve = profile.punctured_curve()?;
    let mut rows = Vec::with_capacity(tau_grid.count);
    for tau in tau_grid.points() {
        let measure = curve.measure_of(tau);
        let bound = a * (2.0 * profile.eps) * kind.envelope(tau);
        if measure > bound {
            return Err(Error::violation(format!("Markov bound at τ = {tau:e}"), measure, bound));
        }
        rows.push((tau, measure, bound));
    }
    Ok(MarkovRecord { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerCakeRecord {
    pub integral: IntegralValue,
    pub bound: f64,
}

/// Reverse direction: if `(c, p)` certify the log-polynomial sublevel bound,
/// then `(1/2ε)∫(-log w/sup)^q ≤ c^{q/p}·p/(p-q)` for `1 < q < p`.
pub fn layer_cake_reverse(profile: &AngularProfile, p: f64, q: f64, c: f64) -> Result<LayerCakeRecord> {
    if !(q > 1.0) {
        return Err(Error::Parameter(format!("q = {q} must exceed 1")));
    }
    if q >= p {
        return Err(Error::Parameter(format!("q = {q} ≥ p = {p}: layer-cake bound diverges")));
    }
    if !(c >= 0.0) {
        return Err(Error::Parameter(format!("constant C = {c} must be nonnegative")));
    }
    let bound = c.powf(q / p) * p / (p - q);
    let integral = integral_condition(profile, IntegralKind::LogPoly { q })?;
    match integral {
        IntegralValue::Finite(v) if v <= bound => Ok(LayerCakeRecord { integral, bound }),
        IntegralValue::Finite(v) => Err(Error::violation(format!("layer-cake bound for q = {q}"), v, bound)),
        IntegralValue::Divergent => Err(Error::violation(format!("layer-cake bound for q = {q}"), f64::INFINITY, bound)),
    }
}
