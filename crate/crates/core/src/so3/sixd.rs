//! The 6D representation: the first two columns of a rotation matrix, mapped
//! back onto SO(3) by Gram-Schmidt.

use nalgebra::{Matrix3, Vector3};

use super::RotationMatrix;
use crate::error::{Error, Result};

/// Minimum norm of `a1` and of the orthogonalized `a2` accepted by [`gs_map`].
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Two (not necessarily orthonormal) column vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SixD {
    pub a1: Vector3<f64>,
    pub a2: Vector3<f64>,
}

impl SixD {
    pub fn new(a1: Vector3<f64>, a2: Vector3<f64>) -> Self {
        Self { a1, a2 }
    }

    /// `[a1x, a1y, a1z, a2x, a2y, a2z]`
    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            a1: Vector3::new(v[0], v[1], v[2]),
            a2: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.a1.x, self.a1.y, self.a1.z, self.a2.x, self.a2.y, self.a2.z]
    }

    pub fn is_finite(&self) -> bool {
        self.a1.iter().chain(self.a2.iter()).all(|v| v.is_finite())
    }

    pub fn to_rotation(&self) -> Result<RotationMatrix> {
        gs_map(self)
    }
}

impl From<&RotationMatrix> for SixD {
    fn from(r: &RotationMatrix) -> Self {
        gs_drop(r)
    }
}

/// Drops the third column.
pub fn gs_drop(r: &RotationMatrix) -> SixD {
    SixD {
        a1: r.column(0),
        a2: r.column(1),
    }
}

/// Intermediate quantities of the Gram-Schmidt map, kept for backpropagation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct GramSchmidt {
    pub b1: Vector3<f64>,
    pub b2: Vector3<f64>,
    pub b3: Vector3<f64>,
    pub a1_norm: f64,
    pub u2_norm: f64,
    pub a2: Vector3<f64>,
}

impl GramSchmidt {
    pub fn forward(s: &SixD) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::DegenerateInput("non-finite component"));
        }
        let a1_norm = s.a1.norm();
        if a1_norm <= DEGENERACY_TOL {
            return Err(Error::DegenerateInput("|a1| is zero"));
        }
        let b1 = s.a1 / a1_norm;
        let u2 = s.a2 - b1 * b1.dot(&s.a2);
        let u2_norm = u2.norm();
        if u2_norm <= DEGENERACY_TOL {
            return Err(Error::DegenerateInput("a2 is parallel to a1"));
        }
        let b2 = u2 / u2_norm;
        let b3 = b1.cross(&b2);
        Ok(Self {
            b1,
            b2,
            b3,
            a1_norm,
            u2_norm,
            a2: s.a2,
        })
    }

    pub fn rotation(&self) -> RotationMatrix {
        RotationMatrix::new_unchecked(Matrix3::from_columns(&[self.b1, self.b2, self.b3]))
    }

    /// Pulls `∂L/∂R` back to `(∂L/∂a1, ∂L/∂a2)`.
    pub fn backward(&self, grad_r: &Matrix3<f64>) -> (Vector3<f64>, Vector3<f64>) {
        let g1: Vector3<f64> = grad_r.column(0).into_owned();
        let g2: Vector3<f64> = grad_r.column(1).into_owned();
        let g3: Vector3<f64> = grad_r.column(2).into_owned();
        let (b1, b2) = (self.b1, self.b2);

        // b3 = b1 × b2
        let mut gb1 = g1 + b2.cross(&g3);
        let gb2 = g2 + g3.cross(&b1);

        // b2 = u2 / |u2|
        let gu2 = (gb2 - b2 * b2.dot(&gb2)) / self.u2_norm;

        // u2 = a2 − (b1·a2) b1
        let b1_gu2 = b1.dot(&gu2);
        let ga2 = gu2 - b1 * b1_gu2;
        gb1 -= self.a2 * b1_gu2 + gu2 * b1.dot(&self.a2);

        // b1 = a1 / |a1|
        let ga1 = (gb1 - b1 * b1.dot(&gb1)) / self.a1_norm;
        (ga1, ga2)
    }
}

/// Maps an arbitrary 6D vector onto SO(3):
/// `b1 = a1/|a1|`, `b2 = u2/|u2|` with `u2 = a2 − (b1·a2) b1`, `b3 = b1 × b2`.
pub fn gs_map(s: &SixD) -> Result<RotationMatrix> {
    GramSchmidt::forward(s).map(|gs| gs.rotation())
}
