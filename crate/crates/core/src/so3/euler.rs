//! Yaw/pitch/roll in degrees under one frozen convention.
//!
//! `R = Rx(yaw) · Ry(−pitch) · Rz(roll)`, i.e. intrinsic X-Y'-Z'' with the
//! middle angle negated. This is the only one of the 24 axis-order and
//! intrinsic/extrinsic conventions (under any angle permutation and sign
//! flip) that reproduces the reference near-gimbal dataset sample
//! `(87.73, 89.32, −87.93)` ↦ its stored matrix. Gimbal lock sits at
//! `pitch = ±90°`.

use nalgebra::Matrix3;

use super::RotationMatrix;

/// Human-readable name of [`EulerAngles`]' convention.
pub const EULER_CONVENTION: &str = "intrinsic XYZ: R = Rx(yaw) * Ry(-pitch) * Rz(roll)";

/// Below this value of `cos(pitch)` the matrix is treated as gimbal-locked.
const GIMBAL_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EulerAngles {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl EulerAngles {
    pub fn new(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self { yaw, pitch, roll }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.yaw, self.pitch, self.roll]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Each angle wrapped into `(−180, 180]`. The rotation may change when
    /// a wrapped angle differs from the original by a full turn only.
    pub fn canonical(&self) -> Self {
        Self::new(wrap_degrees(self.yaw), wrap_degrees(self.pitch), wrap_degrees(self.roll))
    }

    pub fn to_matrix(&self) -> RotationMatrix {
        euler_to_matrix(self)
    }
}

/// Wraps an angle in degrees into `(−180, 180]`.
pub fn wrap_degrees(x: f64) -> f64 {
    let r = x.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r + 0.0
    }
}

/// Wraps an angle in radians into `(−π, π]`.
pub fn wrap_radians(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

pub fn euler_to_matrix(e: &EulerAngles) -> RotationMatrix {
    RotationMatrix::new_unchecked(euler_matrix_radians(
        e.yaw.to_radians(),
        e.pitch.to_radians(),
        e.roll.to_radians(),
    ))
}

/// The convention's matrix for angles in radians.
pub(crate) fn euler_matrix_radians(yaw: f64, pitch: f64, roll: f64) -> Matrix3<f64> {
    let (sa, ca) = yaw.sin_cos();
    let (sb, cb) = (-pitch).sin_cos();
    let (sc, cc) = roll.sin_cos();
    Matrix3::new(
        cb * cc,
        -cb * sc,
        sb,
        ca * sc + sa * sb * cc,
        ca * cc - sa * sb * sc,
        -sa * cb,
        sa * sc - ca * sb * cc,
        sa * cc + ca * sb * sc,
        ca * cb,
    )
}

/// Partial derivatives of [`euler_matrix_radians`] with respect to
/// `(yaw, pitch, roll)`.
pub(crate) fn euler_matrix_partials(yaw: f64, pitch: f64, roll: f64) -> [Matrix3<f64>; 3] {
    let rx = RotationMatrix::about_x(yaw).matrix().to_owned();
    let ry = RotationMatrix::about_y(-pitch).matrix().to_owned();
    let rz = RotationMatrix::about_z(roll).matrix().to_owned();
    let (sa, ca) = yaw.sin_cos();
    let (sb, cb) = (-pitch).sin_cos();
    let (sc, cc) = roll.sin_cos();
    let drx = Matrix3::new(0.0, 0.0, 0.0, 0.0, -sa, -ca, 0.0, ca, -sa);
    // d/dpitch of Ry(−pitch) = −Ry'(−pitch)
    let dry = -Matrix3::new(-sb, 0.0, cb, 0.0, 0.0, 0.0, -cb, 0.0, -sb);
    let drz = Matrix3::new(-sc, -cc, 0.0, cc, -sc, 0.0, 0.0, 0.0, 0.0);
    [drx * ry * rz, rx * dry * rz, rx * ry * drz]
}

/// Inverse of [`euler_to_matrix`] returning canonical angles with
/// `pitch ∈ [−90, 90]`. At gimbal lock roll is set to 0 and yaw absorbs the
/// free rotation.
pub fn matrix_to_euler(r: &RotationMatrix) -> EulerAngles {
    let m = r.matrix();
    let cos_b = m[(0, 0)].hypot(m[(0, 1)]);
    let b = m[(0, 2)].atan2(cos_b);
    let (a, c) = if cos_b > GIMBAL_EPS {
        ((-m[(1, 2)]).atan2(m[(2, 2)]), (-m[(0, 1)]).atan2(m[(0, 0)]))
    } else {
        (m[(2, 1)].atan2(m[(1, 1)]), 0.0)
    };
    EulerAngles::new(
        wrap_degrees(a.to_degrees()),
        wrap_degrees(-b.to_degrees()),
        wrap_degrees(c.to_degrees()),
    )
}

impl From<&RotationMatrix> for EulerAngles {
    fn from(r: &RotationMatrix) -> Self {
        matrix_to_euler(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Rounded values from a near-gimbal pair of dataset samples.
    const SAMPLE_A_MATRIX: [[f64; 3]; 3] = [
        [0.000, 0.012, -0.999],
        [-0.076, -0.997, -0.012],
        [-0.997, 0.076, 0.000],
    ];
    const SAMPLE_B_MATRIX: [[f64; 3]; 3] = [
        [0.002, -0.017, -0.999],
        [0.100, -0.995, 0.017],
        [-0.995, -0.100, -0.001],
    ];

    fn max_entry_error(r: &RotationMatrix, rows: &[[f64; 3]; 3]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((r.get(i, j) - rows[i][j]).abs());
            }
        }
        worst
    }

    #[test]
    fn zero_angles_give_identity() {
        assert_eq!(
            euler_to_matrix(&EulerAngles::new(0.0, 0.0, 0.0)),
            RotationMatrix::identity()
        );
        assert_eq!(
            matrix_to_euler(&RotationMatrix::identity()),
            EulerAngles::new(0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn reproduces_sample_a() {
        let r = euler_to_matrix(&EulerAngles::new(87.73, 89.32, -87.93));
        assert!(max_entry_error(&r, &SAMPLE_A_MATRIX) < 5e-3);
    }

    #[test]
    fn reproduces_sample_b_with_pitch_89_02() {
        // The stored label for this sample reads pitch -98.02, which no
        // convention maps to its matrix; 89.02 does.
        let r = euler_to_matrix(&EulerAngles::new(-92.51, 89.02, 81.73));
        assert!(max_entry_error(&r, &SAMPLE_B_MATRIX) < 5e-3);
    }

    #[test]
    fn inverse_of_sample_a_maps_back() {
        let approx = euler_to_matrix(&EulerAngles::new(87.73, 89.32, -87.93));
        let e = matrix_to_euler(&approx);
        assert!(max_entry_error(&euler_to_matrix(&e), &SAMPLE_A_MATRIX) < 5e-3);
    }

    #[test]
    fn exact_gimbal_lock_sets_roll_to_zero() {
        for (yaw, roll) in [(30.0, 0.0), (30.0, 20.0), (-120.0, 45.0)] {
            let r = euler_to_matrix(&EulerAngles::new(yaw, 90.0, roll));
            let e = matrix_to_euler(&r);
            assert_eq!(e.roll, 0.0);
            assert_abs_diff_eq!(e.pitch, 90.0, epsilon = 1e-9);
            assert!(euler_to_matrix(&e).angle_to(&r) < 1e-9);
        }
        let r = euler_to_matrix(&EulerAngles::new(10.0, -90.0, 5.0));
        let e = matrix_to_euler(&r);
        assert_eq!(e.roll, 0.0);
        assert!(euler_to_matrix(&e).angle_to(&r) < 1e-9);
    }

    #[test]
    fn round_trip_grid_away_from_gimbal_lock() {
        let mut yaw = -179.5;
        while yaw <= 180.0 {
            for pitch in [-88.9, -45.0, -3.0, 0.0, 12.5, 60.0, 88.9] {
                for roll in [-179.9, -90.0, 0.0, 33.3, 180.0] {
                    let e = EulerAngles::new(yaw, pitch, roll);
                    let back = matrix_to_euler(&euler_to_matrix(&e));
                    assert_abs_diff_eq!(back.yaw, yaw, epsilon = 1e-9);
                    assert_abs_diff_eq!(back.pitch, pitch, epsilon = 1e-9);
                    assert_abs_diff_eq!(back.roll, roll, epsilon = 1e-9);
                }
            }
            yaw += 7.25;
        }
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_degrees(180.0), 180.0);
        assert_eq!(wrap_degrees(-180.0), 180.0);
        assert_eq!(wrap_degrees(181.0), -179.0);
        assert_eq!(wrap_degrees(-358.0), 2.0);
        assert_eq!(wrap_degrees(-0.0).to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn partials_match_finite_differences() {
        let (y, p, r) = (0.4, -1.1, 2.3);
        let h = 1e-6;
        let analytic = euler_matrix_partials(y, p, r);
        let shifts = [(h, 0.0, 0.0), (0.0, h, 0.0), (0.0, 0.0, h)];
        for (k, (dy, dp, dr)) in shifts.into_iter().enumerate() {
            let fd = (euler_matrix_radians(y + dy, p + dp, r + dr)
                - euler_matrix_radians(y - dy, p - dp, r - dr))
                / (2.0 * h);
            assert_abs_diff_eq!(analytic[k], fd, epsilon = 1e-8);
        }
    }
}
