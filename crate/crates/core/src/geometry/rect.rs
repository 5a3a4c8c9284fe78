use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Point;

/// Closed rectangle with long axis at angle `alpha ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedRect {
    pub center: Point,
    pub alpha: f64,
    pub length: f64,
    pub width: f64,
}

fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Unsigned angle in `[0, π/2]` between the lines spanned by `a` and `b`.
pub fn line_angle(a: Point, b: Point) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.abs().atan2(dot.abs())
}

impl OrientedRect {
    /// Builds a rectangle, swapping sides (and turning the axis by π/2) if
    /// `width > length`.
    pub fn new(center: Point, alpha: f64, length: f64, width: f64) -> Result<Self> {
        if !(length > 0.0 && width > 0.0 && length.is_finite() && width.is_finite()) {
            return Err(Error::Parameter(format!("rectangle sides must be positive, got L = {length}, W = {width}")));
        }
        if !(alpha.is_finite() && center[0].is_finite() && center[1].is_finite()) {
            return Err(Error::Parameter("rectangle center and angle must be finite".into()));
        }
        let (alpha, length, width) = if width > length { (alpha + PI / 2.0, width, length) } else { (alpha, length, width) };
        Ok(Self { center, alpha: normalize_angle(alpha), length, width })
    }

    pub fn axis(&self) -> Point {
        [self.alpha.cos(), self.alpha.sin()]
    }

    pub fn normal(&self) -> Point {
        [-self.alpha.sin(), self.alpha.cos()]
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    pub fn eccentricity(&self) -> f64 {
        self.width / self.length
    }

    /// Coordinates of `p` along the axis and the normal.
    pub fn local(&self, p: Point) -> (f64, f64) {
        let (u, n) = (self.axis(), self.normal());
        let d = [p[0] - self.center[0], p[1] - self.center[1]];
        (d[0] * u[0] + d[1] * u[1], d[0] * n[0] + d[1] * n[1])
    }

    /// Corners in counterclockwise order starting at `(-L/2, -W/2)` in the local frame.
    pub fn corners(&self) -> [Point; 4] {
        let (u, n) = (self.axis(), self.normal());
        let (a, b) = (self.length / 2.0, self.width / 2.0);
        [(-a, -b), (a, -b), (a, b), (-a, b)]
            .map(|(s, r)| [self.center[0] + s * u[0] + r * n[0], self.center[1] + s * u[1] + r * n[1]])
    }

    pub fn contains_point(&self, p: Point) -> bool {
        self.contains_point_within(p, 0.0)
    }

    /// Containment in the rectangle enlarged by `slack` on every side.
    pub fn contains_point_within(&self, p: Point, slack: f64) -> bool {
        let (s, r) = self.local(p);
        s.abs() <= self.length / 2.0 + slack && r.abs() <= self.width / 2.0 + slack
    }

    /// All four corners of `other` lie in `self`, up to a relative rounding slack of 1e-12.
    pub fn contains_rect(&self, other: &OrientedRect) -> bool {
        let slack = 1e-12 * (self.length + self.width);
        other.corners().iter().all(|&c| self.contains_point_within(c, slack))
    }

    fn half_extent(&self, dir: Point) -> f64 {
        let (u, n) = (self.axis(), self.normal());
        self.length / 2.0 * (u[0] * dir[0] + u[1] * dir[1]).abs() + self.width / 2.0 * (n[0] * dir[0] + n[1] * dir[1]).abs()
    }

    /// Largest gap between the projections of the two rectangles over the
    /// four frame axes; positive iff a separating axis exists.
    pub fn separation(&self, other: &OrientedRect) -> f64 {
        [self.axis(), self.normal(), other.axis(), other.normal()]
            .iter()
            .map(|&d| {
                let dc = (other.center[0] - self.center[0]) * d[0] + (other.center[1] - self.center[1]) * d[1];
                dc.abs() - self.half_extent(d) - other.half_extent(d)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Separating-axis test for closed rectangles.
    pub fn intersects(&self, other: &OrientedRect) -> bool {
        self.separation(other) <= 0.0
    }

    /// Same center and orientation, both sides scaled by `factor ≥ 1`.
    pub fn dilate(&self, factor: f64) -> Result<Self> {
        if !(factor >= 1.0) || !factor.is_finite() {
            return Err(Error::Parameter(format!("dilation factor {factor} must be at least 1")));
        }
        Ok(Self { length: self.length * factor, width: self.width * factor, ..*self })
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let hx = self.half_extent([1.0, 0.0]);
        let hy = self.half_extent([0.0, 1.0]);
        ([self.center[0] - hx, self.center[1] - hy], [self.center[0] + hx, self.center[1] + hy])
    }
}
