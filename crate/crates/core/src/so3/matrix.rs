use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Tolerance on `‖R·Rᵀ − I‖∞` and `|det R − 1|` for matrices built by this crate.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// A proper rotation, stored as a 3×3 matrix with `r_ij` at row `i`, column `j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates `m` against [`ORTHOGONALITY_TOL`].
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        Self::from_matrix_with_tolerance(m, ORTHOGONALITY_TOL)
    }

    pub fn from_matrix_with_tolerance(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotARotation("non-finite entry".into()));
        }
        let ortho = orthogonality_error(&m);
        if ortho > tol {
            return Err(Error::NotARotation(format!(
                "|R R^T - I| = {ortho:e} exceeds {tol:e}"
            )));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > tol {
            return Err(Error::NotARotation(format!("det = {det}")));
        }
        Ok(Self(m))
    }

    /// Row-major construction, `rows[i][j] = r_ij`.
    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::from_matrix(Matrix3::from_fn(|i, j| rows[i][j]))
    }

    /// Callers guarantee orthonormality by construction.
    pub(crate) fn new_unchecked(m: Matrix3<f64>) -> Self {
        debug_assert!(m.iter().all(|v| v.is_finite()));
        Self(m)
    }

    pub fn from_columns(c1: Vector3<f64>, c2: Vector3<f64>, c3: Vector3<f64>) -> Result<Self> {
        Self::from_matrix(Matrix3::from_columns(&[c1, c2, c3]))
    }

    pub fn about_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    pub fn about_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    /// Exponential map of a rotation vector (axis × angle in radians).
    pub fn exp(rotation_vector: Vector3<f64>) -> Self {
        let angle = rotation_vector.norm();
        if angle == 0.0 {
            return Self::identity();
        }
        let axis = rotation_vector / angle;
        super::AxisAngle::new(axis, angle)
            .expect("normalized axis")
            .to_matrix()
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[(i, j)]))
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        std::array::from_fn(|k| self.0[(k / 3, k % 3)])
    }

    /// Column `j` (0-based).
    pub fn column(&self, j: usize) -> Vector3<f64> {
        self.0.column(j).into_owned()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// `tr(self · otherᵀ)`, summed entrywise so that swapping the operands is
    /// bit-identical.
    pub fn trace_with_transpose_of(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += self.0[(i, j)] * other.0[(i, j)];
            }
        }
        acc
    }

    /// Geodesic angle in radians, in `[0, π]`.
    ///
    /// Evaluates `acos(clamp((tr(A Bᵀ) − 1) / 2))` as `atan2(sin θ, cos θ)`
    /// with `sin θ` taken from the skew part of `A Bᵀ`; plain `acos` loses
    /// about eight digits near zero.
    pub fn angle_to(&self, other: &Self) -> f64 {
        let cos = ((self.trace_with_transpose_of(other) - 1.0) / 2.0).clamp(-1.0, 1.0);
        let m = self.0 * other.0.transpose();
        let mt = other.0 * self.0.transpose();
        // m - mᵀ computed from both products keeps the result symmetric in (A, B)
        let skew = Vector3::new(
            (m[(2, 1)] - m[(1, 2)]) - (mt[(2, 1)] - mt[(1, 2)]),
            (m[(0, 2)] - m[(2, 0)]) - (mt[(0, 2)] - mt[(2, 0)]),
            (m[(1, 0)] - m[(0, 1)]) - (mt[(1, 0)] - mt[(0, 1)]),
        );
        let sin = (skew.norm() / 4.0).min(1.0);
        sin.atan2(cos)
    }

    pub fn is_valid(&self) -> bool {
        orthogonality_error(&self.0) <= ORTHOGONALITY_TOL
            && (self.0.determinant() - 1.0).abs() <= ORTHOGONALITY_TOL
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl Mul<&RotationMatrix> for &RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

/// `‖M·Mᵀ − I‖∞` as the largest absolute entry.
pub fn orthogonality_error(m: &Matrix3<f64>) -> f64 {
    (m * m.transpose() - Matrix3::identity()).amax()
}
