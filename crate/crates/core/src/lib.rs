//! Numerical toolkit for directional maximal averages along planar vector
//! fields: the angular variation of a field and its decay audits, oriented
//! rectangle geometry, discretized maximal operators and covering
//! certificates.

pub mod angular;
pub mod covering;
pub mod error;
pub mod exact;
pub mod field;
pub mod geometry;
pub mod operators;

pub use error::{Error, Result};
