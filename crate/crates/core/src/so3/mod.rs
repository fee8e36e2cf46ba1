//! Rotation representations and the conversions among them.
//!
//! [`RotationMatrix`] is the canonical form; every other representation
//! converts to and from it. Angles are degrees in [`EulerAngles`] and radians
//! everywhere else.

mod euler;
mod matrix;
mod quat;
mod random;
mod sixd;

pub use euler::{
    euler_to_matrix, matrix_to_euler, wrap_degrees, wrap_radians, EulerAngles, EULER_CONVENTION,
};
pub(crate) use euler::{euler_matrix_partials, euler_matrix_radians};
pub use matrix::{orthogonality_error, RotationMatrix, ORTHOGONALITY_TOL};
pub use quat::{
    axis_angle_to_matrix, axis_angle_to_quat, matrix_to_axis_angle, matrix_to_quat,
    quat_to_axis_angle, quat_to_matrix, AxisAngle, UnitQuaternion,
};
pub(crate) use quat::{quat_matrix_partials, quat_matrix_raw};
pub use random::{random_quaternion, random_rotation};
pub(crate) use sixd::GramSchmidt;
pub use sixd::{gs_drop, gs_map, SixD, DEGENERACY_TOL};
