use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use sixdpose::losses::LossKind;
use sixdpose::regressor::{train, Head, SyntheticTask, TrainConfig, YawRange, DEFAULT_INPUT_NOISE, DEFAULT_SAMPLES};

use crate::usage;

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory receiving history.csv and summary.json.
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
    /// Yaw range of the synthetic task: narrow (±99°) or full (±180°).
    #[arg(long, default_value = "full", value_parser = parse_range)]
    range: YawRange,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Standard deviation of the noise added to the input matrix entries.
    #[arg(long, default_value_t = DEFAULT_INPUT_NOISE)]
    noise: f64,
    /// First seed; runs use seed, seed + 1, ...
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of paired seeds.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    /// Comma-separated heads to train.
    #[arg(long, value_delimiter = ',', default_value = "sixd,euler,quat", value_parser = parse_head)]
    heads: Vec<Head>,
    /// Comma-separated losses to train with.
    #[arg(long, value_delimiter = ',', default_value = "geodesic", value_parser = parse_loss)]
    losses: Vec<LossKind>,
    #[arg(long, default_value_t = 1.0)]
    weight_mse: f64,
    /// Hidden layer widths, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "64,64")]
    hidden: Vec<usize>,
}

fn parse_range(s: &str) -> Result<YawRange, String> {
    s.parse()
}

fn parse_head(s: &str) -> Result<Head, String> {
    s.parse()
}

fn parse_loss(s: &str) -> Result<LossKind, String> {
    s.parse()
}

#[derive(Serialize)]
struct HistoryRow {
    head: Head,
    loss: LossKind,
    seed: u64,
    epoch: usize,
    train_loss: f64,
    heldout_error_deg: f64,
}

#[derive(Serialize)]
struct RunSummary {
    head: Head,
    loss: LossKind,
    seed: u64,
    initial_error_deg: f64,
    final_error_deg: f64,
    heldout_degenerate: usize,
    seconds: f64,
}

#[derive(Serialize)]
struct Summary {
    task: SyntheticTaskSummary,
    epochs: usize,
    batch_size: usize,
    learning_rate: f64,
    weight_mse: f64,
    hidden: Vec<usize>,
    runs: Vec<RunSummary>,
}

#[derive(Serialize)]
struct SyntheticTaskSummary {
    range: YawRange,
    samples: usize,
    input_noise: f64,
}

pub fn run(args: BenchArgs) -> Result<()> {
    if args.seeds == 0 {
        return Err(usage("bench", "--seeds must be at least 1"));
    }
    if args.heads.is_empty() || args.losses.is_empty() {
        return Err(usage("bench", "--heads and --losses must not be empty"));
    }
    let base = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.lr,
        weight_mse: args.weight_mse,
        hidden: args.hidden.clone(),
        ..TrainConfig::default()
    };
    base.validate().map_err(|e| usage("bench", e.to_string()))?;
    if args.samples < 2 || !(args.noise >= 0.0) {
        return Err(usage("bench", "--samples must be at least 2 and --noise nonnegative"));
    }

    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let history_path = args.out_dir.join("history.csv");
    let mut history = csv::Writer::from_path(&history_path).with_context(|| format!("writing {}", history_path.display()))?;
    let mut runs = Vec::new();

    println!("{:>6} {:>9} {:>5} {:>10} {:>10} {:>8}", "head", "loss", "seed", "initial", "final", "seconds");
    for seed in args.seed..args.seed + args.seeds {
        let task = SyntheticTask {
            samples: args.samples,
            range: args.range,
            input_noise: args.noise,
            seed,
        };
        for &head in &args.heads {
            for &loss in &args.losses {
                let cfg = TrainConfig {
                    seed,
                    head,
                    loss,
                    ..base.clone()
                };
                let start = Instant::now();
                let outcome = train(&task, &cfg)?;
                let seconds = start.elapsed().as_secs_f64();
                for h in &outcome.history {
                    history.serialize(HistoryRow {
                        head,
                        loss,
                        seed,
                        epoch: h.epoch,
                        train_loss: h.train_loss,
                        heldout_error_deg: h.heldout_error_deg,
                    })?;
                }
                println!(
                    "{:>6} {:>9} {:>5} {:>10.2} {:>10.2} {:>8.1}",
                    head.to_string(),
                    loss.to_string(),
                    seed,
                    outcome.initial_error_deg,
                    outcome.final_error_deg(),
                    seconds
                );
                runs.push(RunSummary {
                    head,
                    loss,
                    seed,
                    initial_error_deg: outcome.initial_error_deg,
                    final_error_deg: outcome.final_error_deg(),
                    heldout_degenerate: outcome.heldout_degenerate,
                    seconds,
                });
            }
        }
    }
    history.flush()?;

    let summary = Summary {
        task: SyntheticTaskSummary {
            range: args.range,
            samples: args.samples,
            input_noise: args.noise,
        },
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.lr,
        weight_mse: args.weight_mse,
        hidden: args.hidden,
        runs,
    };
    let summary_path = args.out_dir.join("summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    eprintln!("wrote {} and {}", history_path.display(), summary_path.display());
    Ok(())
}
