use thiserror::Error;

use crate::field::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({}, {}) lies outside the padded field domain", .0[0], .0[1])]
    Domain(Point),

    #[error("degenerate angular profile: sup of w vanishes")]
    DegenerateProfile,

    #[error("profile {index} is degenerate (sup of w vanishes)")]
    DegenerateProfileAt { index: usize },

    #[error("field vanishes at ({}, {}); direction undefined", .0[0], .0[1])]
    UndefinedDirection(Point),

    #[error("regime violated: {0}")]
    Regime(String),

    #[error("no sign change of the balancing equation on the search range")]
    NumericalRange,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported grid size {0}: expected a power of two")]
    UnsupportedSize(usize),

    #[error("series diverges: {0}")]
    Divergent(String),

    #[error("member {index} is inadmissible: {reason}")]
    Inadmissible { index: usize, reason: String },

    #[error("grid specifications differ")]
    GridMismatch,

    #[error("inequality violated at {what}: {lhs} > {rhs}")]
    Violation { what: String, lhs: f64, rhs: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn violation(what: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Error::Violation { what: what.into(), lhs, rhs }
    }
}
