use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so3::{euler_to_matrix, EulerAngles, RotationMatrix};

pub const DEFAULT_SAMPLES: usize = 2000;
pub const DEFAULT_INPUT_NOISE: f64 = 0.05;
pub const HELDOUT_FRACTION: f64 = 0.1;
/// Half-width of the pitch range in degrees, kept clear of gimbal lock.
pub const PITCH_RANGE: f64 = 80.0;
/// Half-width of the roll range in degrees.
pub const ROLL_RANGE: f64 = 99.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YawRange {
    /// ±99°
    Narrow,
    /// ±180°
    Full,
}

impl YawRange {
    pub fn half_width(self) -> f64 {
        match self {
            YawRange::Narrow => 99.0,
            YawRange::Full => 180.0,
        }
    }
}

impl fmt::Display for YawRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            YawRange::Narrow => "narrow",
            YawRange::Full => "full",
        })
    }
}

impl FromStr for YawRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "narrow" => Ok(YawRange::Narrow),
            "full" => Ok(YawRange::Full),
            other => Err(format!("unknown range {other:?} (expected narrow or full)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTask {
    pub samples: usize,
    pub range: YawRange,
    pub input_noise: f64,
    pub seed: u64,
}

impl SyntheticTask {
    pub fn new(range: YawRange, seed: u64) -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            range,
            input_noise: DEFAULT_INPUT_NOISE,
            seed,
        }
    }

    pub fn generate(&self) -> Result<Dataset> {
        if self.samples < 2 {
            return Err(Error::Config("task needs at least 2 samples".into()));
        }
        if !(self.input_noise >= 0.0 && self.input_noise.is_finite()) {
            return Err(Error::Config(format!("invalid input noise {}", self.input_noise)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let noise = Normal::new(0.0, self.input_noise).expect("checked above");
        let yaw = self.range.half_width();

        let samples: Vec<Sample> = (0..self.samples)
            .map(|_| {
                let angles = EulerAngles::new(
                    rng.random_range(-yaw..=yaw),
                    rng.random_range(-PITCH_RANGE..=PITCH_RANGE),
                    rng.random_range(-ROLL_RANGE..=ROLL_RANGE),
                );
                let target = euler_to_matrix(&angles);
                let input = target.to_row_major().map(|v| v + noise.sample(&mut rng));
                Sample { input, target }
            })
            .collect();

        let mut order: Vec<usize> = (0..self.samples).collect();
        order.shuffle(&mut rng);
        let n_heldout = ((self.samples as f64 * HELDOUT_FRACTION).round() as usize).clamp(1, self.samples - 1);
        let (heldout, train) = order.split_at(n_heldout);
        Ok(Dataset {
            train: train.iter().map(|&i| samples[i]).collect(),
            heldout: heldout.iter().map(|&i| samples[i]).collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub input: [f64; 9],
    pub target: RotationMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub train: Vec<Sample>,
    pub heldout: Vec<Sample>,
}
