//! Euler MAE, rotation-vector MAEV and angle-binned errors over pose sets.
//!
//! Samples are paired by id and reduced in ascending id order.

use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pose::PoseSet;
use crate::so3::{wrap_degrees, RotationMatrix};

/// Names of the rotation-matrix columns used by MAEV, by column index.
pub const VECTOR_COLUMNS: [(&str, usize); 3] = [("left", 0), ("down", 1), ("front", 2)];

/// Interval covered by the default binning, degrees.
pub const DEFAULT_BIN_RANGE: (f64, f64) = (-99.0, 99.0);

pub const DEFAULT_BIN_WIDTH: f64 = 33.0;

const MAX_LISTED_IDS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Angle {
    Yaw,
    Pitch,
    Roll,
}

impl Angle {
    pub const ALL: [Angle; 3] = [Angle::Yaw, Angle::Pitch, Angle::Roll];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Angle::Yaw => "yaw",
            Angle::Pitch => "pitch",
            Angle::Roll => "roll",
        })
    }
}

/// Per-angle and overall mean absolute Euler error, degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaeSummary {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
    pub overall: f64,
}

/// Per-vector and overall mean angular error, degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaevSummary {
    pub left: f64,
    pub down: f64,
    pub front: f64,
    pub overall: f64,
}

/// One interval `[lo, hi)` (closed on the last bin) of one angle's ground
/// truth. `mae` is `None` for empty bins.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinStat {
    pub angle: Angle,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mae: Option<f64>,
}

/// Ground truth and prediction of one id, both as Euler angles and matrices.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairedSample {
    pub gt_euler: [f64; 3],
    pub pred_euler: [f64; 3],
    pub gt_rot: RotationMatrix,
    pub pred_rot: RotationMatrix,
}

/// Pairs two sets by id, requiring equal id sets.
pub(crate) fn pair(gt: &PoseSet, pred: &PoseSet) -> Result<Vec<PairedSample>> {
    check_ids(gt, pred)?;
    gt.iter()
        .map(|(id, g)| {
            let p = pred.get(id).expect("id sets checked");
            Ok(PairedSample {
                gt_euler: g.euler()?.to_array(),
                pred_euler: p.euler()?.to_array(),
                gt_rot: g.to_rotation()?,
                pred_rot: p.to_rotation()?,
            })
        })
        .collect()
}

fn check_ids(gt: &PoseSet, pred: &PoseSet) -> Result<()> {
    let missing_in_pred: Vec<&str> = gt.ids().filter(|id| !pred.contains(id)).collect();
    let missing_in_gt: Vec<&str> = pred.ids().filter(|id| !gt.contains(id)).collect();
    if !missing_in_pred.is_empty() || !missing_in_gt.is_empty() {
        let listed = |v: &[&str]| v.iter().take(MAX_LISTED_IDS).map(|s| s.to_string()).collect();
        return Err(Error::MismatchedIds {
            missing_in_pred: listed(&missing_in_pred),
            missing_in_pred_total: missing_in_pred.len(),
            missing_in_gt: listed(&missing_in_gt),
            missing_in_gt_total: missing_in_gt.len(),
        });
    }
    if gt.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(())
}

/// `|pred − gt|` in degrees, optionally reduced across the ±180° seam first.
pub fn angle_error(gt: f64, pred: f64, wrap: bool) -> f64 {
    let d = pred - gt;
    if wrap {
        wrap_degrees(d).abs()
    } else {
        d.abs()
    }
}

/// Angle between two vectors in degrees, `atan2(|u × v|, u · v)`; equal to
/// the clamped `acos` of the normalized dot product.
pub fn vector_angle(u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    u.cross(v).norm().atan2(u.dot(v)).to_degrees()
}

pub(crate) fn mae_of(samples: &[PairedSample], wrap: bool) -> Result<MaeSummary> {
    if samples.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = samples.len() as f64;
    let mut sums = [0.0; 3];
    for s in samples {
        for k in 0..3 {
            sums[k] += angle_error(s.gt_euler[k], s.pred_euler[k], wrap);
        }
    }
    let [yaw, pitch, roll] = sums.map(|v| v / n);
    Ok(MaeSummary {
        yaw,
        pitch,
        roll,
        overall: (yaw + pitch + roll) / 3.0,
    })
}

pub(crate) fn maev_of(samples: &[PairedSample]) -> Result<MaevSummary> {
    if samples.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = samples.len() as f64;
    let mut sums = [0.0; 3];
    for s in samples {
        for (k, (_, col)) in VECTOR_COLUMNS.iter().enumerate() {
            sums[k] += vector_angle(&s.gt_rot.column(*col), &s.pred_rot.column(*col));
        }
    }
    let [left, down, front] = sums.map(|v| v / n);
    Ok(MaevSummary {
        left,
        down,
        front,
        overall: (left + down + front) / 3.0,
    })
}

/// Bin edges starting at `range.0` in steps of `width`, extended by whole
/// bins where needed so that every value in `values` is covered.
pub(crate) fn bin_edges(width: f64, range: (f64, f64), values: &[f64]) -> Result<Vec<f64>> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidValue(format!("bin width must be positive, got {width}")));
    }
    let min = values.iter().copied().fold(range.0, f64::min);
    let max = values.iter().copied().fold(range.1, f64::max);
    let below = ((range.0 - min) / width).ceil() as i64;
    let start = range.0 - below as f64 * width;
    let mut edges = vec![start];
    let mut k = 1;
    loop {
        let edge = start + k as f64 * width;
        // snap the nominal upper end so [-99, 99] stays exact
        let edge = if (edge - range.1).abs() < 1e-9 * width { range.1 } else { edge };
        edges.push(edge);
        if edge >= max {
            break;
        }
        k += 1;
    }
    Ok(edges)
}

/// Index of the half-open bin containing `x`; the last bin is closed.
fn bin_index(edges: &[f64], x: f64) -> usize {
    let bins = edges.len() - 1;
    edges[1..bins].partition_point(|&e| e <= x)
}

pub(crate) fn bins_of(samples: &[PairedSample], width: f64, wrap: bool) -> Result<Vec<BinStat>> {
    if samples.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut out = Vec::new();
    for angle in Angle::ALL {
        let k = angle.index();
        let gt_values: Vec<f64> = samples.iter().map(|s| s.gt_euler[k]).collect();
        let edges = bin_edges(width, DEFAULT_BIN_RANGE, &gt_values)?;
        let bins = edges.len() - 1;
        let mut counts = vec![0usize; bins];
        let mut sums = vec![0.0; bins];
        for s in samples {
            let b = bin_index(&edges, s.gt_euler[k]);
            counts[b] += 1;
            sums[b] += angle_error(s.gt_euler[k], s.pred_euler[k], wrap);
        }
        for b in 0..bins {
            out.push(BinStat {
                angle,
                lo: edges[b],
                hi: edges[b + 1],
                count: counts[b],
                mae: (counts[b] > 0).then(|| sums[b] / counts[b] as f64),
            });
        }
    }
    Ok(out)
}

/// Mean absolute Euler error per angle. With `wrap`, each difference is
/// reduced to `(−180, 180]` before taking its magnitude.
pub fn mae_euler(gt: &PoseSet, pred: &PoseSet, wrap: bool) -> Result<MaeSummary> {
    mae_of(&pair(gt, pred)?, wrap)
}

/// Mean angle between corresponding rotation-matrix columns.
pub fn maev(gt: &PoseSet, pred: &PoseSet) -> Result<MaevSummary> {
    maev_of(&pair(gt, pred)?)
}

/// Per-angle errors bucketed by ground-truth angle in intervals of
/// `bin_width` degrees covering `[−99, 99]` (extended if the data reaches
/// beyond).
pub fn binned_errors(gt: &PoseSet, pred: &PoseSet, bin_width: f64, wrap: bool) -> Result<Vec<BinStat>> {
    bins_of(&pair(gt, pred)?, bin_width, wrap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pose::{Pose, PoseRecord, ReprTag};

    fn euler_set(rows: &[(&str, [f64; 3])]) -> PoseSet {
        PoseSet::from_records(
            ReprTag::Euler,
            rows.iter().map(|(id, v)| PoseRecord {
                id: id.to_string(),
                pose: Pose::Euler(*v),
            }),
        )
        .unwrap()
    }

    #[test]
    fn identical_sets_are_zero() {
        let gt = euler_set(&[("a", [10.0, -20.0, 5.0]), ("b", [-170.0, 40.0, 88.0])]);
        let m = mae_euler(&gt, &gt, true).unwrap();
        assert_eq!((m.yaw, m.pitch, m.roll, m.overall), (0.0, 0.0, 0.0, 0.0));
        let v = maev(&gt, &gt).unwrap();
        assert_eq!((v.left, v.down, v.front, v.overall), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn yaw_wrap() {
        let gt = euler_set(&[("a", [179.0, 0.0, 0.0])]);
        let pred = euler_set(&[("a", [-179.0, 0.0, 0.0])]);
        assert!((mae_euler(&gt, &pred, true).unwrap().yaw - 2.0).abs() < 1e-12);
        assert!((mae_euler(&gt, &pred, false).unwrap().yaw - 358.0).abs() < 1e-12);
    }

    #[test]
    fn mae_arithmetic() {
        let gt = euler_set(&[("a", [0.0, 0.0, 0.0]), ("b", [10.0, 5.0, 5.0])]);
        let pred = euler_set(&[("a", [2.0, 0.0, 3.0]), ("b", [6.0, 5.0, 2.0])]);
        let m = mae_euler(&gt, &pred, false).unwrap();
        assert_eq!((m.yaw, m.pitch, m.roll, m.overall), (3.0, 0.0, 3.0, 2.0));
    }

    #[test]
    fn mismatched_and_empty() {
        let gt = euler_set(&[("a", [0.0; 3]), ("b", [0.0; 3])]);
        let pred = euler_set(&[("a", [0.0; 3]), ("c", [0.0; 3])]);
        match mae_euler(&gt, &pred, false).unwrap_err() {
            Error::MismatchedIds { missing_in_pred, missing_in_gt, .. } => {
                assert_eq!(missing_in_pred, vec!["b"]);
                assert_eq!(missing_in_gt, vec!["c"]);
            }
            e => panic!("{e}"),
        }
        let empty = PoseSet::new(ReprTag::Euler);
        assert!(matches!(maev(&empty, &empty), Err(Error::EmptySet)));
    }

    #[test]
    fn mismatch_lists_at_most_ten() {
        let rows: Vec<(String, [f64; 3])> = (0..25).map(|i| (format!("g{i:02}"), [0.0; 3])).collect();
        let refs: Vec<(&str, [f64; 3])> = rows.iter().map(|(s, v)| (s.as_str(), *v)).collect();
        let gt = euler_set(&refs);
        let pred = euler_set(&[("z", [0.0; 3])]);
        match maev(&gt, &pred).unwrap_err() {
            Error::MismatchedIds { missing_in_pred, missing_in_pred_total, .. } => {
                assert_eq!(missing_in_pred.len(), 10);
                assert_eq!(missing_in_pred_total, 25);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn quarter_turn_about_front_vector() {
        let gt_r = crate::so3::euler_to_matrix(&crate::so3::EulerAngles::new(15.0, 30.0, -40.0));
        // rotating about the third column in the body frame keeps that column fixed
        let pred_r = gt_r * RotationMatrix::about_z(std::f64::consts::FRAC_PI_2);
        let gt = PoseSet::from_rotations(ReprTag::Matrix, [("a".to_string(), &gt_r)]).unwrap();
        let pred = PoseSet::from_rotations(ReprTag::Matrix, [("a".to_string(), &pred_r)]).unwrap();
        let v = maev(&gt, &pred).unwrap();
        assert!((v.left - 90.0).abs() < 1e-9);
        assert!((v.down - 90.0).abs() < 1e-9);
        assert!(v.front.abs() < 1e-9);
        assert!((v.overall - 60.0).abs() < 1e-9);
    }

    #[test]
    fn zero_yaw_lands_in_bin_starting_at_zero() {
        let gt = euler_set(&[("a", [0.0; 3]), ("b", [0.0, 10.0, -10.0])]);
        let bins = binned_errors(&gt, &gt, 33.0, false).unwrap();
        let yaw: Vec<_> = bins.iter().filter(|b| b.angle == Angle::Yaw).collect();
        assert_eq!(yaw.len(), 6);
        let hit: Vec<_> = yaw.iter().filter(|b| b.count > 0).collect();
        assert_eq!(hit.len(), 1);
        assert_eq!((hit[0].lo, hit[0].hi, hit[0].count), (0.0, 33.0, 2));
        assert_eq!(hit[0].mae, Some(0.0));
        assert!(yaw.iter().filter(|b| b.count == 0).all(|b| b.mae.is_none()));
    }

    #[test]
    fn edges_and_closed_last_bin() {
        let edges = bin_edges(33.0, DEFAULT_BIN_RANGE, &[]).unwrap();
        assert_eq!(edges, vec![-99.0, -66.0, -33.0, 0.0, 33.0, 66.0, 99.0]);
        assert_eq!(bin_index(&edges, -99.0), 0);
        assert_eq!(bin_index(&edges, -66.0), 1);
        assert_eq!(bin_index(&edges, 98.9), 5);
        assert_eq!(bin_index(&edges, 99.0), 5);
        let wide = bin_edges(33.0, DEFAULT_BIN_RANGE, &[-180.0, 150.0]).unwrap();
        assert_eq!(wide.first(), Some(&-198.0));
        assert_eq!(wide.last(), Some(&165.0));
        assert!(bin_edges(0.0, DEFAULT_BIN_RANGE, &[]).is_err());
    }

    #[test]
    fn full_range_counts_sum_to_n() {
        let gt = euler_set(&[("a", [-179.0, 0.0, 0.0]), ("b", [120.0, 1.0, 1.0]), ("c", [0.0; 3])]);
        let bins = binned_errors(&gt, &gt, 33.0, true).unwrap();
        for angle in Angle::ALL {
            let total: usize = bins.iter().filter(|b| b.angle == angle).map(|b| b.count).sum();
            assert_eq!(total, 3);
        }
    }
}
