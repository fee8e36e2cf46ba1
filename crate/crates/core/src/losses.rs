//! Geodesic and MSE losses on rotations with analytic gradients through the
//! Gram-Schmidt map.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::so3::{GramSchmidt, RotationMatrix, SixD};

/// The geodesic gradient is defined as 0 once `|cos θ| ≥ 1 − CLAMP_MARGIN`
/// (at the minimum and at the cut locus).
pub const CLAMP_MARGIN: f64 = 1e-7;

/// Default weight of the MSE term in the combined loss.
pub const DEFAULT_WEIGHT_MSE: f64 = 1.0;

/// Radians for geodesic losses, squared entry units for MSE.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LossValue(pub f64);

/// `∂L/∂(a1x, a1y, a1z, a2x, a2y, a2z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradientPacket {
    pub d_sixd: [f64; 6],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Geodesic,
    Mse,
    Combined,
}

impl std::str::FromStr for LossKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "geodesic" => Ok(Self::Geodesic),
            "mse" => Ok(Self::Mse),
            "combined" => Ok(Self::Combined),
            other => Err(format!("unknown loss {other:?} (expected geodesic, mse or combined)")),
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Geodesic => "geodesic",
            Self::Mse => "mse",
            Self::Combined => "combined",
        })
    }
}

/// Angle of `Rp · Rgtᵀ` in radians, `[0, π]`.
pub fn geodesic_distance(rp: &RotationMatrix, rgt: &RotationMatrix) -> LossValue {
    LossValue(rp.angle_to(rgt))
}

/// Geodesic loss and `∂L/∂Rp`.
pub(crate) fn geodesic_matrix(rp: &RotationMatrix, rgt: &RotationMatrix) -> (f64, Matrix3<f64>) {
    let value = rp.angle_to(rgt);
    let cos = (rp.trace_with_transpose_of(rgt) - 1.0) / 2.0;
    if cos.abs() >= 1.0 - CLAMP_MARGIN {
        return (value, Matrix3::zeros());
    }
    // dθ/dc = −1/sin θ and ∂c/∂Rp = Rgt / 2
    let sin = (1.0 - cos * cos).sqrt();
    (value, rgt.matrix() * (-0.5 / sin))
}

/// Mean squared entry difference over the nine entries, and `∂L/∂Rp`.
pub(crate) fn mse_matrix(rp: &RotationMatrix, rgt: &RotationMatrix) -> (f64, Matrix3<f64>) {
    let diff = rp.matrix() - rgt.matrix();
    let value = diff.iter().map(|d| d * d).sum::<f64>() / 9.0;
    (value, diff * (2.0 / 9.0))
}

/// Loss of `kind` between two matrices, and its gradient with respect to `rp`.
pub(crate) fn matrix_loss(
    kind: LossKind,
    weight_mse: f64,
    rp: &RotationMatrix,
    rgt: &RotationMatrix,
) -> (f64, Matrix3<f64>) {
    match kind {
        LossKind::Geodesic => geodesic_matrix(rp, rgt),
        LossKind::Mse => mse_matrix(rp, rgt),
        LossKind::Combined => {
            let (g, dg) = geodesic_matrix(rp, rgt);
            let (m, dm) = mse_matrix(rp, rgt);
            (g + weight_mse * m, dg + dm * weight_mse)
        }
    }
}

fn through_gram_schmidt(
    s: &SixD,
    rgt: &RotationMatrix,
    f: impl FnOnce(&RotationMatrix, &RotationMatrix) -> (f64, Matrix3<f64>),
) -> Result<(LossValue, GradientPacket)> {
    let gs = GramSchmidt::forward(s)?;
    let (value, grad_r) = f(&gs.rotation(), rgt);
    let (ga1, ga2) = gs.backward(&grad_r);
    Ok((
        LossValue(value),
        GradientPacket {
            d_sixd: [ga1.x, ga1.y, ga1.z, ga2.x, ga2.y, ga2.z],
        },
    ))
}

pub fn geodesic_loss_6d(s: &SixD, rgt: &RotationMatrix) -> Result<(LossValue, GradientPacket)> {
    through_gram_schmidt(s, rgt, geodesic_matrix)
}

pub fn mse_loss_6d(s: &SixD, rgt: &RotationMatrix) -> Result<(LossValue, GradientPacket)> {
    through_gram_schmidt(s, rgt, mse_matrix)
}

/// `geodesic + weight_mse · mse`.
pub fn combined_loss_6d(
    s: &SixD,
    rgt: &RotationMatrix,
    weight_mse: f64,
) -> Result<(LossValue, GradientPacket)> {
    through_gram_schmidt(s, rgt, |rp, rgt| {
        matrix_loss(LossKind::Combined, weight_mse, rp, rgt)
    })
}
