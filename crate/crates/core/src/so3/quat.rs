use nalgebra::{Matrix3, Vector3};

use super::RotationMatrix;
use crate::error::{Error, Result};

/// Unit quaternion `(w, x, y, z)`, stored with canonical sign: `w ≥ 0`, and
/// when `w = 0` the first nonzero of `(x, y, z)` is positive.
///
/// `q` and `−q` describe the same rotation; the canonical sign only makes
/// the stored value unique. Use [`UnitQuaternion::same_rotation`] for
/// comparisons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuaternion {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: Self = Self {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Normalizes and canonicalizes `(w, x, y, z)`.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n < 1e-12 {
            return Err(Error::InvalidValue(format!(
                "quaternion ({w}, {x}, {y}, {z}) cannot be normalized"
            )));
        }
        Ok(Self::canonical_from(w / n, x / n, y / n, z / n))
    }

    /// Scalar-last component order, as printed by several Python libraries.
    pub fn from_xyzw(x: f64, y: f64, z: f64, w: f64) -> Result<Self> {
        Self::new(w, x, y, z)
    }

    fn canonical_from(w: f64, x: f64, y: f64, z: f64) -> Self {
        let flip = if w != 0.0 {
            w < 0.0
        } else {
            [x, y, z]
                .into_iter()
                .find(|v| *v != 0.0)
                .is_some_and(|v| v < 0.0)
        };
        // `+ 0.0` turns any negative zero into positive zero
        if flip {
            Self { w: -w + 0.0, x: -x + 0.0, y: -y + 0.0, z: -z + 0.0 }
        } else {
            Self { w: w + 0.0, x: x + 0.0, y: y + 0.0, z: z + 0.0 }
        }
    }

    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    /// `[w, x, y, z]`
    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    /// Equal as rotations within `tol`, treating `q` and `−q` as the same.
    pub fn same_rotation(&self, other: &Self, tol: f64) -> bool {
        let d = self.to_array().iter().zip(other.to_array()).map(|(a, b)| a * b).sum::<f64>();
        1.0 - d.abs() <= tol
    }

    pub fn to_matrix(&self) -> RotationMatrix {
        quat_to_matrix(self)
    }
}

/// Rotation matrix of `(w, x, y, z)` assumed to be of unit norm.
pub(crate) fn quat_matrix_raw(w: f64, x: f64, y: f64, z: f64) -> Matrix3<f64> {
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

/// Partial derivatives of [`quat_matrix_raw`] with respect to `(w, x, y, z)`.
pub(crate) fn quat_matrix_partials(w: f64, x: f64, y: f64, z: f64) -> [Matrix3<f64>; 4] {
    let t = 2.0;
    [
        Matrix3::new(0.0, -z, y, z, 0.0, -x, -y, x, 0.0) * t,
        Matrix3::new(0.0, y, z, y, -2.0 * x, -w, z, w, -2.0 * x) * t,
        Matrix3::new(-2.0 * y, x, w, x, 0.0, z, -w, z, -2.0 * y) * t,
        Matrix3::new(-2.0 * z, -w, x, w, -2.0 * z, y, x, y, 0.0) * t,
    ]
}

pub fn quat_to_matrix(q: &UnitQuaternion) -> RotationMatrix {
    RotationMatrix::new_unchecked(quat_matrix_raw(q.w, q.x, q.y, q.z))
}

/// Largest-pivot extraction: the component with the largest magnitude is
/// recovered from the diagonal, the rest from off-diagonal sums/differences.
pub fn matrix_to_quat(r: &RotationMatrix) -> UnitQuaternion {
    let m = r.matrix();
    let (m00, m11, m22) = (m[(0, 0)], m[(1, 1)], m[(2, 2)]);
    let trace = m00 + m11 + m22;
    let (w, x, y, z) = if trace >= m00 && trace >= m11 && trace >= m22 {
        let s = 2.0 * (1.0 + trace).sqrt();
        (
            s / 4.0,
            (m[(2, 1)] - m[(1, 2)]) / s,
            (m[(0, 2)] - m[(2, 0)]) / s,
            (m[(1, 0)] - m[(0, 1)]) / s,
        )
    } else if m00 >= m11 && m00 >= m22 {
        let s = 2.0 * (1.0 + m00 - m11 - m22).sqrt();
        (
            (m[(2, 1)] - m[(1, 2)]) / s,
            s / 4.0,
            (m[(0, 1)] + m[(1, 0)]) / s,
            (m[(0, 2)] + m[(2, 0)]) / s,
        )
    } else if m11 >= m22 {
        let s = 2.0 * (1.0 - m00 + m11 - m22).sqrt();
        (
            (m[(0, 2)] - m[(2, 0)]) / s,
            (m[(0, 1)] + m[(1, 0)]) / s,
            s / 4.0,
            (m[(1, 2)] + m[(2, 1)]) / s,
        )
    } else {
        let s = 2.0 * (1.0 - m00 - m11 + m22).sqrt();
        (
            (m[(1, 0)] - m[(0, 1)]) / s,
            (m[(0, 2)] + m[(2, 0)]) / s,
            (m[(1, 2)] + m[(2, 1)]) / s,
            s / 4.0,
        )
    };
    UnitQuaternion::new(w, x, y, z).expect("pivot component is at least 1/2")
}

impl From<&RotationMatrix> for UnitQuaternion {
    fn from(r: &RotationMatrix) -> Self {
        matrix_to_quat(r)
    }
}

/// Unit axis and angle in radians, canonically `θ ∈ [0, π]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisAngle {
    axis: Vector3<f64>,
    angle: f64,
}

impl AxisAngle {
    /// Normalizes `axis` and folds `angle` into `[0, π]`, flipping the axis
    /// for negative angles.
    pub fn new(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if !n.is_finite() || n < 1e-12 || !angle.is_finite() {
            return Err(Error::InvalidValue("axis-angle needs a nonzero finite axis".into()));
        }
        let mut axis = axis / n;
        let mut angle = super::euler::wrap_radians(angle);
        if angle < 0.0 {
            angle = -angle;
            axis = -axis;
        }
        Ok(Self { axis, angle })
    }

    pub fn axis(&self) -> Vector3<f64> {
        self.axis
    }

    /// Radians.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn to_quat(&self) -> UnitQuaternion {
        axis_angle_to_quat(self)
    }

    pub fn to_matrix(&self) -> RotationMatrix {
        quat_to_matrix(&axis_angle_to_quat(self))
    }
}

/// `q = (cos(θ/2), x̃ sin(θ/2), ỹ sin(θ/2), z̃ sin(θ/2))`, then canonicalized.
pub fn axis_angle_to_quat(aa: &AxisAngle) -> UnitQuaternion {
    let (s, c) = (aa.angle / 2.0).sin_cos();
    UnitQuaternion::new(c, aa.axis.x * s, aa.axis.y * s, aa.axis.z * s)
        .expect("unit axis gives unit quaternion")
}

/// Below this vector-part norm the rotation is treated as the identity and
/// the axis defaults to `(1, 0, 0)`.
const SMALL_ANGLE_EPS: f64 = 1e-15;

pub fn quat_to_axis_angle(q: &UnitQuaternion) -> AxisAngle {
    let v = q.vector();
    let s = v.norm();
    if s < SMALL_ANGLE_EPS {
        return AxisAngle {
            axis: Vector3::x(),
            angle: 0.0,
        };
    }
    // canonical w ≥ 0 keeps θ in [0, π]
    AxisAngle {
        axis: v / s,
        angle: 2.0 * s.atan2(q.w),
    }
}

pub fn matrix_to_axis_angle(r: &RotationMatrix) -> AxisAngle {
    quat_to_axis_angle(&matrix_to_quat(r))
}

pub fn axis_angle_to_matrix(aa: &AxisAngle) -> RotationMatrix {
    aa.to_matrix()
}
