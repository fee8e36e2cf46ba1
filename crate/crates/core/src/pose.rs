//! Id-keyed orientation samples.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so3::{
    euler_to_matrix, gs_drop, gs_map, matrix_to_euler, matrix_to_quat, orthogonality_error,
    EulerAngles, RotationMatrix, SixD, UnitQuaternion,
};

/// Orthogonality tolerance applied to matrix payloads read from files.
pub const LOAD_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReprTag {
    Euler,
    Matrix,
    Quat,
    Sixd,
}

impl ReprTag {
    pub const ALL: [ReprTag; 4] = [Self::Euler, Self::Matrix, Self::Quat, Self::Sixd];

    /// CSV header, including the leading `id` column.
    pub fn header(self) -> &'static [&'static str] {
        match self {
            Self::Euler => &["id", "yaw", "pitch", "roll"],
            Self::Matrix => &["id", "r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"],
            Self::Quat => &["id", "qw", "qx", "qy", "qz"],
            Self::Sixd => &["id", "a1x", "a1y", "a1z", "a2x", "a2y", "a2z"],
        }
    }

    pub fn width(self) -> usize {
        self.header().len() - 1
    }

    pub fn from_header(columns: &[&str]) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.header() == columns)
    }
}

impl fmt::Display for ReprTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Euler => "euler",
            Self::Matrix => "matrix",
            Self::Quat => "quat",
            Self::Sixd => "sixd",
        })
    }
}

impl FromStr for ReprTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| format!("unknown representation {s:?} (expected euler, matrix, quat or sixd)"))
    }
}

/// Raw payload of one record, exactly as read or written.
///
/// Euler angles are degrees; matrices are row-major; quaternions are
/// `(w, x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pose {
    Euler([f64; 3]),
    Matrix([f64; 9]),
    Quat([f64; 4]),
    Sixd([f64; 6]),
}

impl Pose {
    pub fn tag(&self) -> ReprTag {
        match self {
            Self::Euler(_) => ReprTag::Euler,
            Self::Matrix(_) => ReprTag::Matrix,
            Self::Quat(_) => ReprTag::Quat,
            Self::Sixd(_) => ReprTag::Sixd,
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Self::Euler(v) => v,
            Self::Matrix(v) => v,
            Self::Quat(v) => v,
            Self::Sixd(v) => v,
        }
    }

    /// Checks length and finiteness only.
    pub fn from_values(tag: ReprTag, values: &[f64]) -> Result<Self> {
        if values.len() != tag.width() {
            return Err(Error::InvalidValue(format!(
                "{tag} payload needs {} values, got {}",
                tag.width(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!("non-finite value {v}")));
        }
        Ok(match tag {
            ReprTag::Euler => Self::Euler(values.try_into().unwrap()),
            ReprTag::Matrix => Self::Matrix(values.try_into().unwrap()),
            ReprTag::Quat => Self::Quat(values.try_into().unwrap()),
            ReprTag::Sixd => Self::Sixd(values.try_into().unwrap()),
        })
    }

    pub fn from_rotation(r: &RotationMatrix, tag: ReprTag) -> Self {
        match tag {
            ReprTag::Euler => Self::Euler(matrix_to_euler(r).to_array()),
            ReprTag::Matrix => Self::Matrix(r.to_row_major()),
            ReprTag::Quat => Self::Quat(matrix_to_quat(r).to_array()),
            ReprTag::Sixd => Self::Sixd(gs_drop(r).to_array()),
        }
    }

    /// Whether a matrix payload is orthogonal with positive determinant
    /// within `tol`. Other payloads are always acceptable.
    pub fn passes_matrix_check(&self, tol: f64) -> bool {
        match self {
            Self::Matrix(v) => {
                let m = Matrix3::from_row_slice(v);
                orthogonality_error(&m) <= tol && (m.determinant() - 1.0).abs() <= tol
            }
            _ => true,
        }
    }

    /// Matrix payloads are re-orthonormalized through the 6D map of their
    /// first two columns; quaternions are normalized.
    pub fn to_rotation(&self) -> Result<RotationMatrix> {
        match self {
            Self::Euler(v) => Ok(euler_to_matrix(&EulerAngles::from_array(*v))),
            Self::Matrix(v) => {
                if !self.passes_matrix_check(LOAD_TOLERANCE) {
                    return Err(Error::NotARotation(format!("{v:?}")));
                }
                gs_map(&SixD::new(
                    Vector3::new(v[0], v[3], v[6]),
                    Vector3::new(v[1], v[4], v[7]),
                ))
            }
            Self::Quat(v) => Ok(UnitQuaternion::new(v[0], v[1], v[2], v[3])?.to_matrix()),
            Self::Sixd(v) => gs_map(&SixD::from_array(*v)),
        }
    }

    /// Raw angles for Euler payloads, the frozen-convention decomposition
    /// otherwise.
    pub fn euler(&self) -> Result<EulerAngles> {
        match self {
            Self::Euler(v) => Ok(EulerAngles::from_array(*v)),
            _ => Ok(matrix_to_euler(&self.to_rotation()?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoseRecord {
    pub id: String,
    pub pose: Pose,
}

/// Records of a single representation, iterated in ascending id order.
#[derive(Clone, Debug, PartialEq)]
pub struct PoseSet {
    tag: ReprTag,
    records: BTreeMap<String, Pose>,
    source: Option<PathBuf>,
}

impl PoseSet {
    pub fn new(tag: ReprTag) -> Self {
        Self {
            tag,
            records: BTreeMap::new(),
            source: None,
        }
    }

    pub fn from_records(tag: ReprTag, records: impl IntoIterator<Item = PoseRecord>) -> Result<Self> {
        let mut set = Self::new(tag);
        for r in records {
            set.insert(r.id, r.pose)?;
        }
        Ok(set)
    }

    pub fn from_rotations<'a>(
        tag: ReprTag,
        rotations: impl IntoIterator<Item = (String, &'a RotationMatrix)>,
    ) -> Result<Self> {
        Self::from_records(
            tag,
            rotations.into_iter().map(|(id, r)| PoseRecord {
                id,
                pose: Pose::from_rotation(r, tag),
            }),
        )
    }

    pub fn insert(&mut self, id: String, pose: Pose) -> Result<()> {
        if pose.tag() != self.tag {
            return Err(Error::InvalidValue(format!(
                "record {id:?} is {} in a {} set",
                pose.tag(),
                self.tag
            )));
        }
        if self.records.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.records.insert(id, pose);
        Ok(())
    }

    pub fn tag(&self) -> ReprTag {
        self.tag
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub(crate) fn set_source(&mut self, path: &Path) {
        self.source = Some(path.to_path_buf());
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Pose> {
        self.records.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.records.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Pose)> {
        self.records.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }

    /// Re-expresses every record in `tag`.
    pub fn convert(&self, tag: ReprTag) -> Result<PoseSet> {
        let mut out = PoseSet::new(tag);
        out.source = self.source.clone();
        for (id, pose) in &self.records {
            let pose = if pose.tag() == tag {
                *pose
            } else {
                Pose::from_rotation(&pose.to_rotation()?, tag)
            };
            out.records.insert(id.clone(), pose);
        }
        Ok(out)
    }

    /// Keeps only ids present in `other`.
    pub fn retain_ids_of(&mut self, other: &PoseSet) {
        self.records.retain(|id, _| other.contains(id));
    }
}
