//! Rigid-body geometry in the single table frame.
//!
//! All lengths here and everywhere else in the workspace are centimeters.

use nalgebra::{Matrix3, Quaternion, Rotation3, UnitQuaternion, Vector3};

use crate::error::CoreError;
use crate::model::BoundingBox;

/// Point or displacement in the table frame, in centimeters.
pub type Vec3 = Vector3<f64>;

/// Tolerance for accepting a matrix as orthonormal and a quaternion as unit length.
pub const ROTATION_TOL: f64 = 1e-6;

/// Proper rotation (orthonormal, det = +1), validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Validates `m` as a proper rotation within [`ROTATION_TOL`].
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, CoreError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "rotation matrix",
            });
        }
        let deviation = (m.transpose() * m - Matrix3::identity()).abs().max();
        if deviation > ROTATION_TOL {
            return Err(CoreError::NotOrthonormal {
                max_deviation: deviation,
            });
        }
        let det = m.determinant();
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(CoreError::ImproperRotation { det });
        }
        Ok(Rotation(m))
    }

    /// Accepts a quaternion whose norm is within [`ROTATION_TOL`] of 1,
    /// normalizing it before conversion; rejects anything further off.
    pub fn from_quaternion_xyzw(x: f64, y: f64, z: f64, w: f64) -> Result<Self, CoreError> {
        if ![x, y, z, w].iter().all(|v| v.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "quaternion",
            });
        }
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if (norm - 1.0).abs() > ROTATION_TOL {
            return Err(CoreError::NotUnitQuaternion { norm });
        }
        let unit = UnitQuaternion::new_normalize(q);
        Ok(Rotation(*unit.to_rotation_matrix().matrix()))
    }

    /// Quaternion as `[x, y, z, w]`, canonicalized to `w >= 0` so the file
    /// representation of a rotation is unique.
    pub fn to_quaternion_xyzw(&self) -> [f64; 4] {
        let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(self.0));
        let c = q.coords; // [x, y, z, w]
        if c[3] < 0.0 {
            [-c[0], -c[1], -c[2], -c[3]]
        } else {
            [c[0], c[1], c[2], c[3]]
        }
    }

    /// Rotation by `angle_rad` about the table-frame z axis.
    pub fn about_z(angle_rad: f64) -> Self {
        Rotation(*Rotation3::from_axis_angle(&Vector3::z_axis(), angle_rad).matrix())
    }

    /// Rotation by `angle_rad` about an arbitrary axis; the axis must be nonzero.
    pub fn from_axis_angle(axis: Vec3, angle_rad: f64) -> Result<Self, CoreError> {
        if !(axis.x.is_finite() && axis.y.is_finite() && axis.z.is_finite()) || axis.norm() < 1e-12
        {
            return Err(CoreError::DegenerateAxis);
        }
        Ok(Rotation(
            *Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle_rad).matrix(),
        ))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Composition `self * other` (apply `other` first, then `self`).
    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation(self.0 * other.0)
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.0 * p
    }

    pub fn inverse(&self) -> Self {
        Rotation(self.0.transpose())
    }

    /// Geodesic angle to another rotation, radians in `[0, pi]`.
    pub fn angle_to(&self, other: &Rotation) -> f64 {
        let rel = self.0.transpose() * other.0;
        let cos = ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        cos.acos()
    }
}

/// Rigid transform of one object instance in the table frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Rotation::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: Rotation, translation: Vec3) -> Self {
        Pose {
            rotation,
            translation,
        }
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Pose {
            rotation: Rotation::identity(),
            translation,
        }
    }

    /// `R p + T`.
    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotation.apply(p) + self.translation
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: Rotation(self.rotation.0 * other.rotation.0),
            translation: self.rotation.apply(other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.rotation.inverse();
        Pose {
            translation: -inv.apply(self.translation),
            rotation: inv,
        }
    }
}

/// The eight vertices of the axis-aligned cube with edge `(L + W + H) / 3`,
/// centered at the object-model origin.
///
/// Order is fixed: lexicographic over sign triples `(x, y, z)` with `-`
/// before `+`, i.e. `(-,-,-), (-,-,+), (-,+,-), (-,+,+), (+,-,-), ...`.
pub fn cube_vertices(bbox: &BoundingBox) -> [Vec3; 8] {
    let h = bbox.mean_dimension() / 2.0;
    let mut out = [Vec3::zeros(); 8];
    for (i, v) in out.iter_mut().enumerate() {
        let sx = if i & 4 == 0 { -h } else { h };
        let sy = if i & 2 == 0 { -h } else { h };
        let sz = if i & 1 == 0 { -h } else { h };
        *v = Vec3::new(sx, sy, sz);
    }
    out
}
