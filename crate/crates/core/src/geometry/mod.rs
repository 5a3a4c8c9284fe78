//! Oriented rectangles, their rasterization on square grids, Bourgain
//! rectangles, populations `V(R)` and the dyadic-width partition `Ω_{ε,s}`.
//!
//! `δ` is the half-width of a Bourgain rectangle: its full width is
//! `W = 2δ = 2ε·sup w / |v(x)|`.

mod bourgain;
mod raster;
mod rect;

pub use bourgain::{
    bourgain_rectangle, dyadic_bin, omega_partition, omega_prime, population, BourgainRect, OmegaPartition, Population,
};
pub use raster::{raster_indices, rasterize, GridSpec, RasterMask};
pub use rect::{line_angle, OrientedRect};
