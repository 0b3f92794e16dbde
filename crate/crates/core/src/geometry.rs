//! The Poincare upper half-plane: points, the invariant distance
//! d(z, z') = |z - z'| / (2 sqrt(y y')), and the affine ("ax+b") group that
//! acts on it by fractional linear transformations.

use crate::error::{Error, Result};

/// A point z = x + iy of the upper half-plane, y > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::ArgumentOutOfRange(format!(
                "half-plane point needs finite x and y > 0, got ({x}, {y})"
            )));
        }
        Ok(HalfPlanePoint { x, y })
    }

    /// The base point i = (0, 1).
    pub fn origin() -> Self {
        HalfPlanePoint { x: 0.0, y: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Invariant distance |z - w| / (2 sqrt(y_z y_w)).
pub fn distance(z: HalfPlanePoint, w: HalfPlanePoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    dx.hypot(dy) / (2.0 * (z.y * w.y).sqrt())
}

/// The radial variable u = d(z, i)^2.
pub fn squared_distance_to_origin(z: HalfPlanePoint) -> f64 {
    let d = distance(z, HalfPlanePoint::origin());
    d * d
}

/// Squared distance between two points in coordinates, avoiding the
/// intermediate square root. Used heavily by convolution kernels.
pub fn squared_distance(z: HalfPlanePoint, w: HalfPlanePoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    (dx * dx + dy * dy) / (4.0 * z.y * w.y)
}

/// An element (x, y) of the affine group, acting as z -> x + y z. The
/// identity is (0, 1); y > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    x: f64,
    y: f64,
}

impl GroupElement {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::ArgumentOutOfRange(format!(
                "group element needs finite x and y > 0, got ({x}, {y})"
            )));
        }
        Ok(GroupElement { x, y })
    }

    pub fn identity() -> Self {
        GroupElement { x: 0.0, y: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn inverse(&self) -> Self {
        GroupElement {
            x: -self.x / self.y,
            y: 1.0 / self.y,
        }
    }
}

/// Group law (x, y)(u, v) = (x + y u, y v).
pub fn group_multiply(g: GroupElement, h: GroupElement) -> GroupElement {
    GroupElement {
        x: g.x + g.y * h.x,
        y: g.y * h.y,
    }
}

/// The isometric action z -> (x + y Re z, y Im z).
pub fn act(g: GroupElement, z: HalfPlanePoint) -> HalfPlanePoint {
    HalfPlanePoint {
        x: g.x + g.y * z.x,
        y: g.y * z.y,
    }
}

/// Modular function of the non-unimodular affine group: Delta(x, y) = 1/y.
pub fn modular_function(g: GroupElement) -> f64 {
    1.0 / g.y
}
