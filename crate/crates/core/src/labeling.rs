//! Head-pose labels from 3D facial landmarks and camera extrinsics.
//!
//! A canonical head template is rigidly aligned to each frame's world-space
//! landmarks (Kabsch), and the resulting head orientation is re-expressed in
//! every camera that observes the frame.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pose::{Pose, PoseRecord, PoseSet, ReprTag};
use crate::so3::RotationMatrix;

/// Frames whose alignment RMSD exceeds this many world units are skipped.
pub const DEFAULT_RMSD_MAX: f64 = 1.0;

/// Ratio of smallest to largest singular value below which a point
/// configuration is treated as rank deficient.
const RANK_TOL: f64 = 1e-9;

/// Landmarks in a canonical head frame, centered on their centroid.
///
/// Frame convention: `+x` to the subject's left, `+y` down, `+z` out of the
/// face.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadTemplate {
    points: Vec<Vector3<f64>>,
}

impl HeadTemplate {
    /// Recenters `points` and checks that they span three dimensions.
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self> {
        check_finite(&points)?;
        if points.len() < 3 {
            return Err(Error::DegenerateGeometry(format!(
                "template needs at least 3 points, got {}",
                points.len()
            )));
        }
        let c = centroid(&points);
        let points: Vec<_> = points.into_iter().map(|p| p - c).collect();
        let cov = points.iter().fold(Matrix3::zeros(), |acc, p| acc + p * p.transpose());
        let sv = cov.singular_values();
        if sv.min() <= RANK_TOL * sv.max() {
            return Err(Error::DegenerateGeometry("template covariance is not rank 3".into()));
        }
        Ok(Self { points })
    }

    /// A coarse 14-point head in centimeters: eyes, brows, nose, mouth,
    /// chin, ears, crown and back of the head.
    pub fn synthetic() -> Self {
        let pts = [
            [3.2, -3.5, 8.5],   // left eye
            [-3.2, -3.5, 8.5],  // right eye
            [3.8, -5.5, 8.8],   // left brow
            [-3.8, -5.5, 8.8],  // right brow
            [0.0, 0.0, 11.0],   // nose tip
            [0.0, -3.0, 9.5],   // nose bridge
            [2.5, 4.0, 9.0],    // left mouth corner
            [-2.5, 4.0, 9.0],   // right mouth corner
            [0.0, 8.5, 7.5],    // chin
            [7.5, 0.0, 0.0],    // left ear
            [-7.5, 0.0, 0.0],   // right ear
            [0.0, -10.5, 1.0],  // crown
            [0.0, -2.0, -9.5],  // back of head
            [0.0, 6.0, -6.0],   // nape
        ];
        Self::new(pts.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect())
            .expect("synthetic template is non-degenerate")
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `R · p + t` for every template point.
    pub fn place(&self, rotation: &RotationMatrix, translation: &Vector3<f64>) -> Vec<Vector3<f64>> {
        self.points.iter().map(|p| rotation.rotate(p) + translation).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkSet {
    pub subject_id: String,
    pub frame_id: String,
    pub points: Vec<Vector3<f64>>,
}

/// World → camera transform.
#[derive(Clone, Debug, PartialEq)]
pub struct CameraExtrinsics {
    pub camera_id: String,
    pub rotation: RotationMatrix,
    pub translation: Vector3<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alignment {
    pub rotation: RotationMatrix,
    pub translation: Vector3<f64>,
    /// Root-mean-square residual, world units.
    pub rmsd: f64,
}

fn check_finite(points: &[Vector3<f64>]) -> Result<()> {
    if points.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
        return Err(Error::DegenerateGeometry("non-finite coordinate".into()));
    }
    Ok(())
}

fn centroid(points: &[Vector3<f64>]) -> Vector3<f64> {
    points.iter().sum::<Vector3<f64>>() / points.len() as f64
}

/// Least-squares rigid transform taking the template onto `observed`.
///
/// Minimizes `Σ ‖R·p + t − q‖²` over proper rotations; a reflection in the
/// unconstrained solution is removed by flipping the smallest singular
/// direction.
pub fn kabsch_align(template: &HeadTemplate, observed: &[Vector3<f64>]) -> Result<Alignment> {
    if observed.len() != template.len() {
        return Err(Error::DegenerateGeometry(format!(
            "{} observed points for a {}-point template",
            observed.len(),
            template.len()
        )));
    }
    check_finite(observed)?;
    let c_obs = centroid(observed);
    // template points are already centered
    let h = template
        .points
        .iter()
        .zip(observed)
        .fold(Matrix3::zeros(), |acc, (p, q)| acc + p * (q - c_obs).transpose());

    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^T"));
    let sv = svd.singular_values;
    if sv.max() == 0.0 || sv.min() <= RANK_TOL * sv.max() {
        return Err(Error::DegenerateGeometry(
            "landmarks are collinear or coincident".into(),
        ));
    }
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let mut flip = Matrix3::identity();
    let smallest = sv.imin();
    flip[(smallest, smallest)] = d;
    let r = v * flip * u.transpose();
    let rotation = RotationMatrix::from_matrix(r)
        .map_err(|e| Error::DegenerateGeometry(format!("alignment lost orthogonality: {e}")))?;
    let translation = c_obs;

    let sq: f64 = template
        .points
        .iter()
        .zip(observed)
        .map(|(p, q)| (rotation.rotate(p) + translation - q).norm_squared())
        .sum();
    Ok(Alignment {
        rotation,
        translation,
        rmsd: (sq / observed.len() as f64).sqrt(),
    })
}

/// Head orientation in the camera frame, `R_cam · R_head_world`.
pub fn world_to_camera_pose(head_world: &RotationMatrix, camera: &CameraExtrinsics) -> RotationMatrix {
    camera.rotation * *head_world
}

/// Record id for one frame seen by one camera.
pub fn record_id(subject: &str, frame: &str, camera: &str) -> String {
    format!("{subject}_{frame}_{camera}")
}

/// One frame of world-space landmarks and the cameras that observe it.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelFrame {
    pub landmarks: LandmarkSet,
    pub cameras: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LabelStats {
    pub frames: usize,
    pub records: usize,
    pub skipped_rmsd: usize,
    pub skipped_degenerate: usize,
}

impl LabelStats {
    pub fn skipped(&self) -> usize {
        self.skipped_rmsd + self.skipped_degenerate
    }
}

/// Labels every (frame, camera) pair, returning records sorted by id.
///
/// Frames that fail alignment or exceed `rmsd_max` are counted and skipped;
/// an unknown camera id aborts.
pub fn label_dataset(
    frames: &[LabelFrame],
    cameras: &BTreeMap<String, CameraExtrinsics>,
    template: &HeadTemplate,
    rmsd_max: f64,
) -> Result<(Vec<PoseRecord>, LabelStats)> {
    for frame in frames {
        if let Some(missing) = frame.cameras.iter().find(|c| !cameras.contains_key(*c)) {
            return Err(Error::UnknownCamera(missing.clone()));
        }
    }

    let mut stats = LabelStats {
        frames: frames.len(),
        ..Default::default()
    };
    let mut records = Vec::new();
    for frame in frames {
        let alignment = match kabsch_align(template, &frame.landmarks.points) {
            Ok(a) => a,
            Err(Error::DegenerateGeometry(_)) => {
                stats.skipped_degenerate += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !(alignment.rmsd <= rmsd_max) {
            stats.skipped_rmsd += 1;
            continue;
        }
        for cam_id in &frame.cameras {
            let pose = world_to_camera_pose(&alignment.rotation, &cameras[cam_id]);
            records.push(PoseRecord {
                id: record_id(&frame.landmarks.subject_id, &frame.landmarks.frame_id, cam_id),
                pose: Pose::from_rotation(&pose, ReprTag::Matrix),
            });
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    stats.records = records.len();
    Ok((records, stats))
}

// ---- landmark JSON ----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CameraJson {
    #[serde(rename = "R")]
    pub rotation: [[f64; 3]; 3],
    pub t: [f64; 3],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CameraRef {
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameJson {
    pub subject: String,
    pub frame: String,
    pub camera: CameraRef,
    pub points: Vec<[f64; 3]>,
}

/// `{"template": [[x,y,z],...], "cameras": {id: {"R": 3×3, "t": [x,y,z]}},
/// "frames": [{"subject", "frame", "camera", "points"}]}`. A frame's
/// `camera` may be a single id or a list of ids.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LandmarkFile {
    pub template: Vec<[f64; 3]>,
    pub cameras: BTreeMap<String, CameraJson>,
    pub frames: Vec<FrameJson>,
}

/// Validated contents of a landmark file.
#[derive(Clone, Debug)]
pub struct LabelingInput {
    pub template: HeadTemplate,
    pub cameras: BTreeMap<String, CameraExtrinsics>,
    pub frames: Vec<LabelFrame>,
}

fn vec3(p: &[f64; 3]) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

impl LandmarkFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_input(self) -> Result<LabelingInput> {
        let template = HeadTemplate::new(self.template.iter().map(vec3).collect())?;
        let cameras = self
            .cameras
            .into_iter()
            .map(|(id, cam)| {
                let rotation = RotationMatrix::from_rows(cam.rotation).map_err(|e| {
                    Error::InvalidValue(format!("camera {id:?}: {e}"))
                })?;
                Ok((
                    id.clone(),
                    CameraExtrinsics {
                        camera_id: id,
                        rotation,
                        translation: vec3(&cam.t),
                    },
                ))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let frames = self
            .frames
            .into_iter()
            .map(|f| LabelFrame {
                landmarks: LandmarkSet {
                    subject_id: f.subject,
                    frame_id: f.frame,
                    points: f.points.iter().map(vec3).collect(),
                },
                cameras: match f.camera {
                    CameraRef::One(c) => vec![c],
                    CameraRef::Many(cs) => cs,
                },
            })
            .collect();
        Ok(LabelingInput {
            template,
            cameras,
            frames,
        })
    }
}

impl LabelingInput {
    pub fn label(&self, rmsd_max: f64) -> Result<(PoseSet, LabelStats)> {
        let (records, stats) = label_dataset(&self.frames, &self.cameras, &self.template, rmsd_max)?;
        Ok((PoseSet::from_records(ReprTag::Matrix, records)?, stats))
    }
}
