//! Two dataset labels with near-identical orientation but very different
//! Euler and quaternion parameterizations.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::Result;
use crate::losses::geodesic_distance;
use crate::so3::{gs_map, matrix_to_quat, RotationMatrix, SixD, UnitQuaternion};

pub const MAX_WITNESS_DISTANCE: f64 = 0.20;
pub const MIN_WITNESS_EULER_GAP: f64 = 170.0;

/// One printed label: Euler angles in degrees, a scalar-last quaternion and a
/// three-decimal rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrintedLabel {
    pub euler: [f64; 3],
    pub quat_xyzw: [f64; 4],
    pub matrix: [[f64; 3]; 3],
}

impl PrintedLabel {
    pub fn raw_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.matrix[i][j])
    }

    /// The printed matrix, re-orthonormalized from its first two columns.
    pub fn rotation(&self) -> Result<RotationMatrix> {
        let m = self.raw_matrix();
        gs_map(&SixD::new(
            Vector3::new(m[(0, 0)], m[(1, 0)], m[(2, 0)]),
            Vector3::new(m[(0, 1)], m[(1, 1)], m[(2, 1)]),
        ))
    }

    pub fn quaternion(&self) -> Result<UnitQuaternion> {
        let [x, y, z, w] = self.quat_xyzw;
        UnitQuaternion::from_xyzw(x, y, z, w)
    }
}

pub const LEFT: PrintedLabel = PrintedLabel {
    euler: [87.73, 89.32, -87.93],
    quat_xyzw: [0.707, -0.023, -0.707, 0.031],
    matrix: [[0.000, 0.012, -0.999], [-0.076, -0.997, -0.012], [-0.997, 0.076, 0.000]],
};

pub const RIGHT: PrintedLabel = PrintedLabel {
    euler: [-92.51, -98.02, 81.73],
    quat_xyzw: [-0.707, -0.029, 0.706, 0.041],
    matrix: [[0.002, -0.017, -0.999], [0.100, -0.995, 0.017], [-0.995, -0.100, -0.001]],
};

#[derive(Clone, Debug, Serialize)]
pub struct AmbiguityWitness {
    pub geodesic_rad: f64,
    /// Per-component absolute Euler difference in degrees.
    pub euler_gap: [f64; 3],
    /// Canonical `(w, x, y, z)` quaternions.
    pub quats: [[f64; 4]; 2],
    pub sign_patterns: [[i8; 4]; 2],
}

impl AmbiguityWitness {
    pub fn distance_ok(&self) -> bool {
        self.geodesic_rad <= MAX_WITNESS_DISTANCE
    }

    pub fn euler_gap_ok(&self) -> bool {
        self.euler_gap.iter().any(|g| *g >= MIN_WITNESS_EULER_GAP)
    }

    pub fn sign_patterns_differ(&self) -> bool {
        self.sign_patterns[0] != self.sign_patterns[1]
    }

    pub fn holds(&self) -> bool {
        self.distance_ok() && self.euler_gap_ok() && self.sign_patterns_differ()
    }
}

fn sign_pattern(q: &[f64; 4]) -> [i8; 4] {
    q.map(|v| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 })
}

pub fn ambiguity_witness(a: &PrintedLabel, b: &PrintedLabel) -> Result<AmbiguityWitness> {
    let geodesic_rad = geodesic_distance(&a.rotation()?, &b.rotation()?).0;
    let euler_gap = std::array::from_fn(|k| (a.euler[k] - b.euler[k]).abs());
    let quats = [a.quaternion()?.to_array(), b.quaternion()?.to_array()];
    Ok(AmbiguityWitness {
        geodesic_rad,
        euler_gap,
        quats,
        sign_patterns: [sign_pattern(&quats[0]), sign_pattern(&quats[1])],
    })
}

/// Human-readable listing of both labels and the witness checks.
pub fn render(a: &PrintedLabel, b: &PrintedLabel, w: &AmbiguityWitness) -> Result<String> {
    let mut out = String::new();
    for (name, label) in [("left", a), ("right", b)] {
        let r = label.rotation()?;
        let q = matrix_to_quat(&r).to_array();
        let _ = writeln!(out, "{name}");
        let _ = writeln!(
            out,
            "  euler (yaw, pitch, roll) : {:8.2} {:8.2} {:8.2}",
            label.euler[0], label.euler[1], label.euler[2]
        );
        let _ = writeln!(
            out,
            "  quaternion (w, x, y, z)  : {:8.3} {:8.3} {:8.3} {:8.3}",
            q[0], q[1], q[2], q[3]
        );
        for (i, row) in r.rows().iter().enumerate() {
            let lead = if i == 0 { "  matrix                   :" } else { "                            " };
            let _ = writeln!(out, "{lead} {:8.3} {:8.3} {:8.3}", row[0], row[1], row[2]);
        }
    }
    let _ = writeln!(
        out,
        "geodesic distance: {:.4} rad ({:.2} deg), limit {MAX_WITNESS_DISTANCE} rad: {}",
        w.geodesic_rad,
        w.geodesic_rad.to_degrees(),
        verdict(w.distance_ok())
    );
    let _ = writeln!(
        out,
        "euler gap: {:.2} {:.2} {:.2} deg, need one >= {MIN_WITNESS_EULER_GAP}: {}",
        w.euler_gap[0],
        w.euler_gap[1],
        w.euler_gap[2],
        verdict(w.euler_gap_ok())
    );
    let _ = writeln!(
        out,
        "quaternion sign patterns: {:?} vs {:?}: {}",
        w.sign_patterns[0],
        w.sign_patterns[1],
        verdict(w.sign_patterns_differ())
    );
    Ok(out)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}
