//! Rotation representations for head-pose work: conversions among Euler
//! angles, quaternions, axis-angle, matrices and the continuous 6D form;
//! geodesic and MSE losses with analytic gradients; evaluation metrics;
//! multi-camera label generation; and a small trainable regressor.

pub mod demo;
pub mod error;
pub mod io;
pub mod labeling;
pub mod losses;
pub mod metrics;
pub mod pose;
pub mod regressor;
pub mod report;
pub mod so3;

pub use error::{Error, Result};
pub use losses::{
    combined_loss_6d, geodesic_distance, geodesic_loss_6d, mse_loss_6d, GradientPacket, LossKind,
    LossValue,
};
pub use pose::{Pose, PoseRecord, PoseSet, ReprTag};
pub use report::{evaluate, ErrorReport, EvalOptions};
pub use so3::{
    gs_drop, gs_map, matrix_to_euler, euler_to_matrix, EulerAngles, RotationMatrix, SixD,
    UnitQuaternion,
};
