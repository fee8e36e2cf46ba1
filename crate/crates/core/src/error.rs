use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The 6D vector carries no orientation information.
    #[error("degenerate 6D input: {0}")]
    DegenerateInput(&'static str),

    #[error("not a rotation matrix: {0}")]
    NotARotation(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("id sets differ: {} missing from prediction {:?}, {} missing from ground truth {:?}",
        .missing_in_pred_total, .missing_in_pred, .missing_in_gt_total, .missing_in_gt)]
    MismatchedIds {
        /// First (at most ten) ids present in ground truth only.
        missing_in_pred: Vec<String>,
        missing_in_pred_total: usize,
        /// First (at most ten) ids present in the prediction only.
        missing_in_gt: Vec<String>,
        missing_in_gt_total: usize,
    },

    #[error("pose set is empty")]
    EmptySet,

    #[error("degenerate point geometry: {0}")]
    DegenerateGeometry(String),

    #[error("unknown camera id {0:?}")]
    UnknownCamera(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("record {0:?} is not a valid rotation matrix")]
    InvalidMatrix(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
