//! Discrete averaging and maximal operators along a field, candidate
//! rectangle families, weak-type ratios, the dyadic Littlewood–Paley split
//! and the scale-sum audits built on it.
//!
//! `A_ε` keeps the `1/ε` normalization over an interval of length `2ε`, so
//! `A_ε 1 = 2`.

mod average;
mod family;
mod fourier;
mod grid_fn;

pub use average::{average_a, maximal_mv, DyadicScales};
pub use family::{
    lambda_log_bracket, laceyli_maximal, tilde_maximal, weak_type_ratio, weak_type_sup, Candidate, CandidateFamily,
    FamilySpec, LaceyLiCaps, MaximalOutput, OrientationRule, WidthRule,
};
pub use fourier::{
    band_index, bump, cutoff_multiplier, lp_decompose, mollified_cutoff, scale_sum_audit, signed_frequency,
    single_scale_audit, BandDecomposition, ScaleSumRecord, ScaleWeights, SingleScaleRecord,
};
pub use grid_fn::GridFunction;
