//! A small MLP trained through interchangeable rotation heads on a synthetic
//! matrix-to-rotation task.

mod head;
mod mlp;
mod task;
mod train;

pub use head::{head_loss, Head, HeadLoss, HeadOutput, Target, QUAT_NORM_FLOOR};
pub use mlp::Mlp;
pub use task::{
    Dataset, Sample, SyntheticTask, YawRange, DEFAULT_INPUT_NOISE, DEFAULT_SAMPLES,
    HELDOUT_FRACTION, PITCH_RANGE, ROLL_RANGE,
};
pub use train::{
    loss_and_grad, mean_error_deg, train, train_on, EpochStats, TrainConfig, TrainOutcome,
    ADAM_BETA1, ADAM_BETA2, ADAM_EPS,
};
