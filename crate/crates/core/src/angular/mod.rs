//! The angular variation `w_x(t) = |det[v(x + t v(x)), v(x)]|` and the
//! audits built on its sampled sublevel sets.
//!
//! A profile samples `w_x` on `N_t + 1` equispaced nodes of `[-ε, ε]`
//! (`N_t` even, so `t = 0` is a node). Two discrete measures live on those
//! nodes:
//!
//! * the trapezoid measure (weights `h`, endpoints `h/2`), used by
//!   [`sublevel_measure`] and by every plain quadrature;
//! * the punctured trapezoid measure, identical except that the node
//!   `t = 0` carries no mass. `w_x(0) = 0` for every field, so the
//!   integrands of the integral conditions are infinite there; they and
//!   their Chebyshev / layer-cake companions are evaluated on the punctured
//!   measure so that both sides of each inequality see the same samples.

mod balance;
mod decay;
mod doubling;
mod kernel;

pub use balance::{
    balance_sign_changes, balance_tau, bound_factor, envelope_ordering_log_threshold, envelope_ordering_threshold, BalanceRegime, BalanceRoot,
    FactorRegime,
};
pub use decay::{
    decay_sweep, fit_decay_constant, integral_condition, layer_cake_reverse, markov_transfer, DecayKind,
    DecayReport, IntegralKind, IntegralValue, LayerCakeRecord, MarkovRecord, SweepRow, TauGrid, Witness,
};
pub use doubling::{doubling_check, doubling_tau0, DoublingRecord};
pub use kernel::{kernel_split_audit, KernelSplitRecord, KernelSplitRow};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Point};

pub const MIN_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct AngularProfile {
    pub x: Point,
    pub eps: f64,
    pub v_at_x: Point,
    pub n_t: usize,
    pub w_values: Vec<f64>,
    pub sup_w: f64,
    pub argmax_t: f64,
}

fn det(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn check_samples(eps: f64, n_t: usize) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("scale ε = {eps} must be positive")));
    }
    if n_t < MIN_SAMPLES || n_t % 2 != 0 {
        return Err(Error::Parameter(format!("N_t = {n_t} must be even and ≥ {MIN_SAMPLES}")));
    }
    Ok(())
}

/// Samples `w_x(t)` on `[-ε, ε]`. Fails with a domain error if the segment
/// `x + t v(x)` leaves the padded box.
pub fn angular_profile(field: &FieldSpec, x: Point, eps: f64, n_t: usize) -> Result<AngularProfile> {
    check_samples(eps, n_t)?;
    let v = field.evaluate(x)?;
    let mut w_values = Vec::with_capacity(n_t + 1);
    for i in 0..=n_t {
        let t = node(eps, n_t, i);
        let y = [x[0] + t * v[0], x[1] + t * v[1]];
        let vy = field.evaluate(y)?;
        w_values.push(det(vy, v).abs());
    }
    Ok(AngularProfile::assemble(x, eps, v, w_values))
}

fn node(eps: f64, n_t: usize, i: usize) -> f64 {
    eps * (2.0 * i as f64 - n_t as f64) / n_t as f64
}

impl AngularProfile {
    /// Profile from raw samples on `[-ε, ε]`, for synthetic audits. The base
    /// point is the origin and the field direction `(1, 0)`.
    pub fn from_samples(eps: f64, w_values: Vec<f64>) -> Result<Self> {
        if w_values.len() < 2 {
            return Err(Error::Parameter("need at least two samples".into()));
        }
        check_samples(eps, w_values.len() - 1)?;
        if w_values.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Parameter("samples must be finite and nonnegative".into()));
        }
        Ok(Self::assemble([0.0, 0.0], eps, [1.0, 0.0], w_values))
    }

    /// Synthetic profile `w(t) = shape(t)` sampled on the standard nodes.
    pub fn from_fn(eps: f64, n_t: usize, shape: impl Fn(f64) -> f64) -> Result<Self> {
        check_samples(eps, n_t)?;
        Self::from_samples(eps, (0..=n_t).map(|i| shape(node(eps, n_t, i))).collect())
    }

    fn assemble(x: Point, eps: f64, v_at_x: Point, w_values: Vec<f64>) -> Self {
        let n_t = w_values.len() - 1;
        let (imax, sup_w) = w_values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bw), (i, w)| if w > bw { (i, w) } else { (bi, bw) });
        Self { x, eps, v_at_x, n_t, w_values, sup_w, argmax_t: node(eps, n_t, imax) }
    }

    pub fn t(&self, i: usize) -> f64 {
        node(self.eps, self.n_t, i)
    }

    pub fn step(&self) -> f64 {
        2.0 * self.eps / self.n_t as f64
    }

    pub fn is_degenerate(&self) -> bool {
        self.sup_w == 0.0
    }

    pub fn center_index(&self) -> usize {
        self.n_t / 2
    }

    /// Trapezoid weights on the profile nodes.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.n_t + 1];
        w[0] = h / 2.0;
        w[self.n_t] = h / 2.0;
        w
    }

    /// Trapezoid weights with the node `t = 0` removed.
    pub fn punctured_weights(&self) -> Vec<f64> {
        let mut w = self.weights();
        w[self.center_index()] = 0.0;
        w
    }

    pub fn sublevel_curve(&self) -> Result<SublevelCurve> {
        SublevelCurve::new(self, self.weights())
    }

    pub(crate) fn punctured_curve(&self) -> Result<SublevelCurve> {
        SublevelCurve::new(self, self.punctured_weights())
    }
}

/// Distribution function `τ ↦ μ{t : w(t) < τ·sup w}` of a sampled profile,
/// stored as samples sorted by value with cumulative weights.
#[derive(Debug, Clone)]
pub struct SublevelCurve {
    eps: f64,
    sup_w: f64,
    sorted_w: Vec<f64>,
    cumulative: Vec<f64>,
}

impl SublevelCurve {
    fn new(profile: &AngularProfile, weights: Vec<f64>) -> Result<Self> {
        if profile.is_degenerate() {
            return Err(Error::DegenerateProfile);
        }
        let mut pairs: Vec<(f64, f64)> = profile.w_values.iter().copied().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cumulative = Vec::with_capacity(pairs.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for &(_, wt) in &pairs {
            acc += wt;
            cumulative.push(acc);
        }
        Ok(Self { eps: profile.eps, sup_w: profile.sup_w, sorted_w: pairs.iter().map(|p| p.0).collect(), cumulative })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Measure of `{w < τ·sup w}`.
    pub fn measure_of(&self, tau: f64) -> f64 {
        let threshold = tau * self.sup_w;
        let k = self.sorted_w.partition_point(|&w| w < threshold);
        self.cumulative[k]
    }
}

/// `μ{t ∈ [-ε, ε] : w(t) < τ·sup w}` under the trapezoid measure.
pub fn sublevel_measure(curve: &SublevelCurve, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Parameter(format!("τ = {tau} outside (0, 1)")));
    }
    Ok(curve.measure_of(tau))
}
