//! Output heads: how the network's raw output becomes a rotation, and how a
//! rotation loss flows back into that raw output.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{geodesic_matrix, matrix_loss, LossKind};
use crate::so3::{
    euler_matrix_partials, euler_matrix_radians, quat_matrix_partials, quat_matrix_raw,
    wrap_radians, GramSchmidt, RotationMatrix, SixD,
};

/// Norm floor applied before normalizing a quaternion head output.
pub const QUAT_NORM_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    Sixd,
    Euler,
    Quat,
}

impl Head {
    pub const ALL: [Head; 3] = [Head::Sixd, Head::Euler, Head::Quat];

    pub fn output_width(self) -> usize {
        match self {
            Head::Sixd => 6,
            Head::Euler => 3,
            Head::Quat => 4,
        }
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Head::Sixd => "sixd",
            Head::Euler => "euler",
            Head::Quat => "quat",
        })
    }
}

impl FromStr for Head {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sixd" => Ok(Head::Sixd),
            "euler" => Ok(Head::Euler),
            "quat" => Ok(Head::Quat),
            other => Err(format!("unknown head {other:?} (expected sixd, euler or quat)")),
        }
    }
}

/// Decoded network output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HeadOutput {
    Sixd(SixD),
    /// Yaw, pitch, roll in radians.
    Euler([f64; 3]),
    /// `(w, x, y, z)` after division by `max(‖o‖, QUAT_NORM_FLOOR)`.
    Quat([f64; 4]),
}

impl HeadOutput {
    pub fn decode(head: Head, raw: &[f64]) -> Self {
        assert_eq!(raw.len(), head.output_width(), "head width");
        match head {
            Head::Sixd => HeadOutput::Sixd(SixD::from_array(raw.try_into().unwrap())),
            Head::Euler => HeadOutput::Euler(raw.try_into().unwrap()),
            Head::Quat => {
                let n = raw.iter().map(|v| v * v).sum::<f64>().sqrt().max(QUAT_NORM_FLOOR);
                HeadOutput::Quat(std::array::from_fn(|k| raw[k] / n))
            }
        }
    }

    pub fn to_rotation(&self) -> Result<RotationMatrix> {
        match self {
            HeadOutput::Sixd(s) => s.to_rotation(),
            HeadOutput::Euler(a) => Ok(RotationMatrix::new_unchecked(euler_matrix_radians(a[0], a[1], a[2]))),
            HeadOutput::Quat(q) => {
                let n2: f64 = q.iter().map(|v| v * v).sum();
                if (n2 - 1.0).abs() > 1e-9 {
                    return Err(Error::DegenerateInput("quaternion output has zero norm"));
                }
                Ok(RotationMatrix::new_unchecked(quat_matrix_raw(q[0], q[1], q[2], q[3])))
            }
        }
    }
}

/// Supervision target: the rotation and, for angle-space losses, its Euler
/// angles in radians under the frozen convention.
#[derive(Clone, Copy, Debug)]
pub struct Target {
    pub rotation: RotationMatrix,
    pub euler_radians: [f64; 3],
}

impl Target {
    pub fn new(rotation: RotationMatrix) -> Self {
        let e = crate::so3::matrix_to_euler(&rotation);
        Self {
            rotation,
            euler_radians: e.to_array().map(f64::to_radians),
        }
    }
}

/// Value and `∂L/∂raw` of a head's loss, plus the predicted rotation.
#[derive(Clone, Debug)]
pub struct HeadLoss {
    pub value: f64,
    pub grad: Vec<f64>,
    pub prediction: RotationMatrix,
}

fn contract(g: &Matrix3<f64>, partial: &Matrix3<f64>) -> f64 {
    g.component_mul(partial).sum()
}

/// Loss of one raw network output against `target`.
///
/// | head  | geodesic        | mse                      | combined                    |
/// |-------|-----------------|--------------------------|-----------------------------|
/// | sixd  | via Gram-Schmidt| matrix entries           | geodesic + w·mse            |
/// | euler | via Euler matrix| wrapped angle difference | geodesic + w·wrapped angles |
/// | quat  | via quaternion matrix | matrix entries     | geodesic + w·mse            |
pub fn head_loss(
    head: Head,
    loss: LossKind,
    weight_mse: f64,
    raw: &[f64],
    target: &Target,
) -> Result<HeadLoss> {
    match head {
        Head::Sixd => {
            let gs = GramSchmidt::forward(&SixD::from_array(raw.try_into().unwrap()))?;
            let prediction = gs.rotation();
            let (value, g) = matrix_loss(loss, weight_mse, &prediction, &target.rotation);
            let (ga1, ga2) = gs.backward(&g);
            Ok(HeadLoss {
                value,
                grad: vec![ga1.x, ga1.y, ga1.z, ga2.x, ga2.y, ga2.z],
                prediction,
            })
        }
        Head::Euler => {
            let (y, p, r) = (raw[0], raw[1], raw[2]);
            let prediction = RotationMatrix::new_unchecked(euler_matrix_radians(y, p, r));
            let mut value = 0.0;
            let mut grad = vec![0.0; 3];
            if matches!(loss, LossKind::Geodesic | LossKind::Combined) {
                let (v, g) = geodesic_matrix(&prediction, &target.rotation);
                value += v;
                for (k, partial) in euler_matrix_partials(y, p, r).iter().enumerate() {
                    grad[k] += contract(&g, partial);
                }
            }
            if matches!(loss, LossKind::Mse | LossKind::Combined) {
                let w = if loss == LossKind::Mse { 1.0 } else { weight_mse };
                for k in 0..3 {
                    let d = wrap_radians(raw[k] - target.euler_radians[k]);
                    value += w * d * d / 3.0;
                    grad[k] += w * 2.0 * d / 3.0;
                }
            }
            Ok(HeadLoss {
                value,
                grad,
                prediction,
            })
        }
        Head::Quat => {
            let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < QUAT_NORM_FLOOR {
                return Err(Error::DegenerateInput("quaternion output has zero norm"));
            }
            let q: [f64; 4] = std::array::from_fn(|k| raw[k] / norm);
            let prediction = RotationMatrix::new_unchecked(quat_matrix_raw(q[0], q[1], q[2], q[3]));
            let (value, g) = matrix_loss(loss, weight_mse, &prediction, &target.rotation);
            let gq: Vec<f64> = quat_matrix_partials(q[0], q[1], q[2], q[3])
                .iter()
                .map(|partial| contract(&g, partial))
                .collect();
            let radial: f64 = gq.iter().zip(&q).map(|(a, b)| a * b).sum();
            let grad = gq.iter().zip(&q).map(|(g, qk)| (g - qk * radial) / norm).collect();
            Ok(HeadLoss {
                value,
                grad,
                prediction,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sixd_output_is_rejected() {
        let out = HeadOutput::decode(Head::Sixd, &[0.0; 6]);
        assert!(matches!(out.to_rotation(), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn quat_output_is_normalized() {
        match HeadOutput::decode(Head::Quat, &[2.0, 0.0, 0.0, 0.0]) {
            HeadOutput::Quat(q) => assert_eq!(q, [1.0, 0.0, 0.0, 0.0]),
            other => panic!("{other:?}"),
        }
        assert!(HeadOutput::decode(Head::Quat, &[0.0; 4]).to_rotation().is_err());
    }

    #[test]
    fn perfect_prediction_has_zero_loss() {
        let r = crate::so3::euler_to_matrix(&crate::so3::EulerAngles::new(40.0, -20.0, 100.0));
        let target = Target::new(r);
        let raw = target.euler_radians;
        for loss in [LossKind::Geodesic, LossKind::Mse, LossKind::Combined] {
            let l = head_loss(Head::Euler, loss, 1.0, &raw, &target).unwrap();
            assert!(l.value < 1e-12, "{loss}: {}", l.value);
        }
    }
}
