use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{LossKind, DEFAULT_WEIGHT_MSE};

use super::head::{head_loss, Head, HeadOutput, Target};
use super::mlp::Mlp;
use super::task::{Dataset, Sample, SyntheticTask};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub head: Head,
    pub loss: LossKind,
    pub weight_mse: f64,
    pub hidden: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 64,
            learning_rate: 1e-3,
            seed: 0,
            head: Head::Sixd,
            loss: LossKind::Geodesic,
            weight_mse: DEFAULT_WEIGHT_MSE,
            hidden: vec![64, 64],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        // lr = 0 is accepted: it freezes the network, which the tests rely on
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("invalid learning rate {}", self.learning_rate)));
        }
        if !(self.weight_mse >= 0.0 && self.weight_mse.is_finite()) {
            return Err(Error::Config(format!("invalid mse weight {}", self.weight_mse)));
        }
        if self.hidden.contains(&0) {
            return Err(Error::Config("hidden widths must be positive".into()));
        }
        Ok(())
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![9];
        w.extend(&self.hidden);
        w.push(self.head.output_width());
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean training loss over the epoch's minibatches.
    pub train_loss: f64,
    /// Mean held-out geodesic error in degrees after the epoch.
    pub heldout_error_deg: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub mlp: Mlp,
    pub initial_error_deg: f64,
    pub history: Vec<EpochStats>,
    /// Held-out predictions that could not be turned into a rotation.
    pub heldout_degenerate: usize,
}

impl TrainOutcome {
    pub fn final_error_deg(&self) -> f64 {
        self.history.last().map_or(self.initial_error_deg, |h| h.heldout_error_deg)
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.t);
        let c2 = 1.0 - ADAM_BETA2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * grad[i];
            self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

/// Loss of one sample and its gradient with respect to every network
/// parameter.
pub fn loss_and_grad(mlp: &Mlp, cfg: &TrainConfig, sample: &Sample) -> Result<(f64, Vec<f64>)> {
    let mut grad = vec![0.0; mlp.num_params()];
    let loss = accumulate(mlp, cfg, sample, &Target::new(sample.target), &mut grad)?;
    Ok((loss, grad))
}

fn accumulate(mlp: &Mlp, cfg: &TrainConfig, sample: &Sample, target: &Target, grad: &mut [f64]) -> Result<f64> {
    let acts = mlp.forward_cached(&sample.input);
    let l = head_loss(cfg.head, cfg.loss, cfg.weight_mse, acts.output(), target)?;
    mlp.backward(&acts, &l.grad, grad);
    Ok(l.value)
}

/// Mean geodesic error in degrees over `samples`, plus the number of
/// predictions that were degenerate (each counted as 180°).
pub fn mean_error_deg(mlp: &Mlp, head: Head, samples: &[Sample]) -> (f64, usize) {
    let mut sum = 0.0;
    let mut degenerate = 0;
    for s in samples {
        match HeadOutput::decode(head, &mlp.forward(&s.input)).to_rotation() {
            Ok(r) => sum += r.angle_to(&s.target),
            Err(_) => {
                degenerate += 1;
                sum += std::f64::consts::PI;
            }
        }
    }
    ((sum / samples.len() as f64).to_degrees(), degenerate)
}

pub fn train(task: &SyntheticTask, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let data = task.generate()?;
    train_on(&data, cfg)
}

pub fn train_on(data: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if data.train.is_empty() || data.heldout.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut mlp = Mlp::new(&cfg.widths(), &mut rng)?;
    let targets: Vec<Target> = data.train.iter().map(|s| Target::new(s.target)).collect();
    let (initial_error_deg, _) = mean_error_deg(&mlp, cfg.head, &data.heldout);

    let mut adam = Adam::new(mlp.num_params());
    let mut grad = vec![0.0; mlp.num_params()];
    let mut order: Vec<usize> = (0..data.train.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut heldout_degenerate = 0;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut batch_loss = 0.0;
            let mut used = 0;
            for &i in batch {
                // a degenerate output contributes no gradient for this step
                if let Ok(l) = accumulate(&mlp, cfg, &data.train[i], &targets[i], &mut grad) {
                    batch_loss += l;
                    used += 1;
                }
            }
            if used == 0 {
                continue;
            }
            let scale = 1.0 / used as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            adam.step(mlp.params_mut(), &grad, cfg.learning_rate);
            loss_sum += batch_loss * scale;
            batches += 1;
        }
        let (err, degenerate) = mean_error_deg(&mlp, cfg.head, &data.heldout);
        heldout_degenerate = degenerate;
        history.push(EpochStats {
            epoch: epoch + 1,
            train_loss: if batches > 0 { loss_sum / batches as f64 } else { f64::NAN },
            heldout_error_deg: err,
        });
    }

    Ok(TrainOutcome {
        mlp,
        initial_error_deg,
        history,
        heldout_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regressor::task::YawRange;

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig { epochs: 0, ..Default::default() },
            TrainConfig { batch_size: 0, ..Default::default() },
            TrainConfig { learning_rate: -1.0, ..Default::default() },
            TrainConfig { learning_rate: f64::NAN, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))));
        }
    }

    #[test]
    fn zero_learning_rate_freezes_network() {
        let task = SyntheticTask { samples: 200, ..SyntheticTask::new(YawRange::Narrow, 2) };
        let cfg = TrainConfig { epochs: 1, learning_rate: 0.0, ..Default::default() };
        let out = train(&task, &cfg).unwrap();
        let init = Mlp::new(&cfg.widths(), &mut ChaCha8Rng::seed_from_u64(cfg.seed)).unwrap();
        assert_eq!(out.mlp, init);
        assert_eq!(out.history.len(), 1);
        assert_eq!(out.history[0].heldout_error_deg, out.initial_error_deg);
    }
}
