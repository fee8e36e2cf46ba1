use std::collections::BTreeMap;

use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use sixdpose::labeling::{kabsch_align, CameraJson, CameraRef, FrameJson, HeadTemplate, LandmarkFile};
use sixdpose::pose::{PoseSet, ReprTag};
use sixdpose::report::{evaluate, EvalOptions};
use sixdpose::so3::{random_rotation, RotationMatrix};
use sixdpose::{geodesic_distance, Error};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn exact_points_give_exact_transform(seed in any::<u64>(), t in prop::array::uniform3(-500.0..500.0f64)) {
        let template = HeadTemplate::synthetic();
        let r = random_rotation(&mut ChaCha8Rng::seed_from_u64(seed));
        let t = Vector3::from(t);
        let a = kabsch_align(&template, &template.place(&r, &t)).unwrap();
        prop_assert!(geodesic_distance(&a.rotation, &r).0 <= 1e-9);
        prop_assert!((a.translation - t).norm() <= 1e-9);
        prop_assert!(a.rmsd <= 1e-9);
    }

    #[test]
    fn noise_never_beats_the_truth(seed in any::<u64>(), sigma in 0.01..0.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let template = HeadTemplate::synthetic();
        let r = random_rotation(&mut rng);
        let noise = Normal::new(0.0, sigma).unwrap();
        let observed: Vec<_> = template
            .place(&r, &Vector3::zeros())
            .into_iter()
            .map(|p| p + Vector3::from_fn(|_, _| noise.sample(&mut rng)))
            .collect();
        let a = kabsch_align(&template, &observed).unwrap();
        let c = observed.iter().sum::<Vector3<f64>>() / observed.len() as f64;
        let truth_rmsd = (template.place(&r, &c).iter().zip(&observed).map(|(p, q)| (p - q).norm_squared()).sum::<f64>()
            / observed.len() as f64)
            .sqrt();
        prop_assert!(a.rmsd <= truth_rmsd + 1e-12);
        prop_assert!(geodesic_distance(&a.rotation, &r).0 < 0.2);
    }
}

fn rows(r: &RotationMatrix) -> [[f64; 3]; 3] {
    r.rows()
}

fn to_arr(p: &Vector3<f64>) -> [f64; 3] {
    [p.x, p.y, p.z]
}

#[test]
fn labels_from_json_match_ground_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let template = HeadTemplate::synthetic();
    let cam_rot: Vec<RotationMatrix> = (0..3).map(|_| random_rotation(&mut rng)).collect();
    let cameras: BTreeMap<String, CameraJson> = cam_rot
        .iter()
        .enumerate()
        .map(|(i, r)| (format!("cam{i}"), CameraJson { rotation: rows(r), t: [i as f64, 0.0, 100.0] }))
        .collect();

    let mut frames = Vec::new();
    let mut truth = Vec::new();
    for f in 0..40 {
        let head = random_rotation(&mut rng);
        let t = Vector3::from_fn(|_, _| rng.random_range(-50.0..50.0));
        frames.push(FrameJson {
            subject: "subj".into(),
            frame: format!("{f:03}"),
            camera: if f % 2 == 0 { CameraRef::One("cam1".into()) } else { CameraRef::Many(vec!["cam0".into(), "cam2".into()]) },
            points: template.place(&head, &t).iter().map(to_arr).collect(),
        });
        let cams: &[usize] = if f % 2 == 0 { &[1] } else { &[0, 2] };
        for &c in cams {
            truth.push((format!("subj_{f:03}_cam{c}"), cam_rot[c] * head));
        }
    }
    // one frame with a missing landmark and one that does not fit the template
    let mut short = frames[0].clone();
    short.frame = "short".into();
    short.points.pop();
    let mut warped = frames[0].clone();
    warped.frame = "warped".into();
    warped.points[0][0] += 40.0;
    frames.push(short);
    frames.push(warped);

    let file = LandmarkFile {
        template: template.points().iter().map(to_arr).collect(),
        cameras,
        frames,
    };
    let text = serde_json::to_string(&file).unwrap();
    let input = LandmarkFile::from_json(&text).unwrap().into_input().unwrap();
    let (labels, stats) = input.label(1.0).unwrap();
    assert_eq!(stats.frames, 42);
    assert_eq!(stats.records, 60);
    assert_eq!(stats.skipped_degenerate, 1);
    assert_eq!(stats.skipped_rmsd, 1);

    let gt = PoseSet::from_rotations(ReprTag::Quat, truth.iter().map(|(id, r)| (id.clone(), r))).unwrap();
    let report = evaluate(&gt, &labels, &EvalOptions::default()).unwrap();
    assert!(report.maev.overall < 1e-6, "{:?}", report.maev);
}

#[test]
fn unknown_camera_is_an_error() {
    let text = r#"{"template": [[1,0,0],[0,1,0],[0,0,1],[1,1,1]],
        "cameras": {"a": {"R": [[1,0,0],[0,1,0],[0,0,1]], "t": [0,0,0]}},
        "frames": [{"subject": "s", "frame": "1", "camera": "b",
                    "points": [[1,0,0],[0,1,0],[0,0,1],[1,1,1]]}]}"#;
    let input = LandmarkFile::from_json(text).unwrap().into_input().unwrap();
    assert!(matches!(input.label(1.0), Err(Error::UnknownCamera(c)) if c == "b"));
}

#[test]
fn camera_rotation_must_be_proper() {
    let text = r#"{"template": [[1,0,0],[0,1,0],[0,0,1],[1,1,1]],
        "cameras": {"a": {"R": [[1,0,0],[0,1,0],[0,0,-1]], "t": [0,0,0]}},
        "frames": []}"#;
    assert!(LandmarkFile::from_json(text).unwrap().into_input().is_err());
}
