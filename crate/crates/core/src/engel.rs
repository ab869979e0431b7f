//! The Engel group: group law, left-invariant frame, causal classification.
//!
//! Coordinates `q = (x1, x2, y, z)` on R^4. The horizontal distribution is
//! spanned by the left-invariant fields X1, X2 below, and carries the
//! Lorentzian metric `g(X1,X1) = -1`, `g(X2,X2) = 1`, `g(X1,X2) = 0`.

use serde::{Deserialize, Serialize};

/// Width of the zero band used when classifying vectors on the light cone.
pub const LIGHT_CONE_BAND: f64 = 1e-14;

/// A point of the Engel group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub x1: f64,
    pub x2: f64,
    pub y: f64,
    pub z: f64,
}

impl GroupPoint {
    pub const IDENTITY: GroupPoint = GroupPoint {
        x1: 0.0,
        x2: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x1: f64, x2: f64, y: f64, z: f64) -> Self {
        GroupPoint { x1, x2, y, z }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.x2, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        GroupPoint::new(a[0], a[1], a[2], a[3])
    }

    /// Largest coordinate magnitude (sup norm).
    pub fn norm_inf(self) -> f64 {
        self.x1
            .abs()
            .max(self.x2.abs())
            .max(self.y.abs())
            .max(self.z.abs())
    }

    /// Componentwise distance in sup norm.
    pub fn dist_inf(self, other: GroupPoint) -> f64 {
        (self.x1 - other.x1)
            .abs()
            .max((self.x2 - other.x2).abs())
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

/// A horizontal tangent vector, written in the frame {X1, X2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HorizontalVector {
    pub u1: f64,
    pub u2: f64,
}

/// The group product `p (*) q`.
pub fn group_mul(p: GroupPoint, q: GroupPoint) -> GroupPoint {
    GroupPoint {
        x1: p.x1 + q.x1,
        x2: p.x2 + q.x2,
        y: p.y + q.y + (p.x1 * q.x2 - q.x1 * p.x2) / 2.0,
        z: p.z
            + q.z
            + p.x2 * q.x2 / 2.0 * (p.x2 + q.x2)
            + p.x1 * q.y
            + p.x1 * q.x2 / 2.0 * (p.x1 + q.x1),
    }
}

/// The group inverse: `group_mul(p, group_inv(p))` is the identity.
pub fn group_inv(p: GroupPoint) -> GroupPoint {
    GroupPoint {
        x1: -p.x1,
        x2: -p.x2,
        y: -p.y,
        z: p.x1 * p.y - p.z,
    }
}

/// The left-invariant frame at `q`, returned as four coordinate columns
/// `[X1(q), X2(q), X3(q), X4(q)]`:
///
/// ```text
/// X1 = d/dx1 - (x2/2) d/dy
/// X2 = d/dx2 + (x1/2) d/dy + ((x1^2 + x2^2)/2) d/dz
/// X3 = d/dy + x1 d/dz
/// X4 = d/dz
/// ```
pub fn frame_at(q: GroupPoint) -> [[f64; 4]; 4] {
    [
        [1.0, 0.0, -q.x2 / 2.0, 0.0],
        [0.0, 1.0, q.x1 / 2.0, (q.x1 * q.x1 + q.x2 * q.x2) / 2.0],
        [0.0, 0.0, 1.0, q.x1],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

/// Express a coordinate tangent vector `v` at `q` in the frame; returns the
/// four frame coefficients. The frame matrix is unit lower triangular in the
/// ordering (x1, x2, y, z), so this is exact forward substitution.
pub fn to_frame_coords(q: GroupPoint, v: [f64; 4]) -> [f64; 4] {
    let cols = frame_at(q);
    let u1 = v[0];
    let u2 = v[1];
    let u3 = v[2] - u1 * cols[0][2] - u2 * cols[1][2];
    let u4 = v[3] - u2 * cols[1][3] - u3 * cols[2][3];
    [u1, u2, u3, u4]
}

/// Causal character of a horizontal vector.
///
/// The metric value is `g(v, v) = -u1^2 + u2^2`. Following the convention
/// that the zero vector is spacelike, [`CausalClass::Zero`] also answers
/// `true` to [`CausalClass::is_spacelike`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausalClass {
    Timelike,
    Spacelike,
    Lightlike,
    Zero,
}

impl CausalClass {
    /// Spacelike in the wide sense: positive metric square or the zero vector.
    pub fn is_spacelike(self) -> bool {
        matches!(self, CausalClass::Spacelike | CausalClass::Zero)
    }
}

/// The metric square `g(v, v) = -u1^2 + u2^2`.
pub fn metric_square(v: HorizontalVector) -> f64 {
    -v.u1 * v.u1 + v.u2 * v.u2
}

/// Classify a horizontal vector by the sign of its metric square, with a zero
/// band of [`LIGHT_CONE_BAND`] (scaled by the vector size) around the light
/// cone to absorb float noise.
pub fn causal_class(v: HorizontalVector) -> CausalClass {
    let g = metric_square(v);
    let scale = (v.u1 * v.u1 + v.u2 * v.u2).max(1.0);
    if v.u1 == 0.0 && v.u2 == 0.0 {
        CausalClass::Zero
    } else if g < -LIGHT_CONE_BAND * scale {
        CausalClass::Timelike
    } else if g > LIGHT_CONE_BAND * scale {
        CausalClass::Spacelike
    } else {
        CausalClass::Lightlike
    }
}
