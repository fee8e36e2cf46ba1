use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use sixdpose::demo::{ambiguity_witness, render, LEFT, RIGHT};
use sixdpose::io::{load_pose_csv_with_tolerance, save_pose_csv};
use sixdpose::labeling::{LandmarkFile, DEFAULT_RMSD_MAX};
use sixdpose::metrics::DEFAULT_BIN_WIDTH;
use sixdpose::pose::{ReprTag, LOAD_TOLERANCE};
use sixdpose::report::{evaluate, EvalOptions};

mod bench;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "sixdpose", version, about = "Rotation-representation toolkit for head-pose labels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rewrite a pose CSV in another representation.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// euler, matrix, quat or sixd
        #[arg(long, value_parser = parse_tag)]
        to: ReprTag,
        /// Orthogonality tolerance for matrix inputs.
        #[arg(long, default_value_t = LOAD_TOLERANCE)]
        tolerance: f64,
    },
    /// Compare predictions against ground truth and print the error report.
    Eval {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, value_enum, default_value_t = Wrap::Auto)]
        wrap: Wrap,
        #[arg(long, default_value_t = DEFAULT_BIN_WIDTH)]
        bin_width: f64,
        /// Evaluate only ids present in both files.
        #[arg(long)]
        intersect: bool,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = LOAD_TOLERANCE)]
        tolerance: f64,
    },
    /// Turn landmark JSON into per-camera rotation labels.
    Label {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Frames whose template fit exceeds this RMSD are skipped.
        #[arg(long, default_value_t = DEFAULT_RMSD_MAX)]
        rmsd_max: f64,
    },
    /// Train the regressor under several heads and losses.
    Bench(bench::BenchArgs),
    /// Print the two look-alike labels and check their ambiguity.
    DemoAmbiguity,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Wrap {
    On,
    Off,
    Auto,
}

fn parse_tag(s: &str) -> Result<ReprTag, String> {
    s.parse()
}

/// Bad flag values detected after parsing.
#[derive(Debug)]
struct UsageError {
    subcommand: &'static str,
    message: String,
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage(subcommand: &'static str, message: impl Into<String>) -> anyhow::Error {
    UsageError {
        subcommand,
        message: message.into(),
    }
    .into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            // clap omits the synopsis for some errors, e.g. invalid values
            if !e.to_string().contains("Usage:") {
                if let Some(name) = std::env::args().nth(1) {
                    print_synopsis(&name);
                }
            }
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<UsageError>() {
            Some(u) => {
                eprintln!("error: {}\n", u.message);
                print_synopsis(u.subcommand);
                ExitCode::from(EXIT_USAGE)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_DATA)
            }
        },
    }
}

fn print_synopsis(subcommand: &str) {
    let mut cmd = Cli::command();
    cmd.build();
    if let Some(sub) = cmd.find_subcommand_mut(subcommand) {
        eprintln!("\n{}", sub.render_usage());
    }
}

fn check_tolerance(subcommand: &'static str, tolerance: f64) -> Result<()> {
    if tolerance > 0.0 && tolerance.is_finite() {
        Ok(())
    } else {
        Err(usage(subcommand, format!("--tolerance must be positive, got {tolerance}")))
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Convert {
            input,
            output,
            to,
            tolerance,
        } => {
            check_tolerance("convert", tolerance)?;
            let set = load_pose_csv_with_tolerance(&input, tolerance)
                .with_context(|| format!("reading {}", input.display()))?;
            let converted = set.convert(to)?;
            save_pose_csv(&converted, &output).with_context(|| format!("writing {}", output.display()))?;
            eprintln!("converted {} records from {} to {}", converted.len(), set.tag(), to);
        }
        Command::Eval {
            gt,
            pred,
            wrap,
            bin_width,
            intersect,
            json,
            tolerance,
        } => {
            check_tolerance("eval", tolerance)?;
            if !(bin_width > 0.0 && bin_width.is_finite()) {
                return Err(usage("eval", format!("--bin-width must be positive, got {bin_width}")));
            }
            let gt_set = load_pose_csv_with_tolerance(&gt, tolerance)
                .with_context(|| format!("reading {}", gt.display()))?;
            let pred_set = load_pose_csv_with_tolerance(&pred, tolerance)
                .with_context(|| format!("reading {}", pred.display()))?;
            let options = EvalOptions {
                wrap: match wrap {
                    Wrap::On => Some(true),
                    Wrap::Off => Some(false),
                    Wrap::Auto => None,
                },
                bin_width,
                intersect,
            };
            let report = evaluate(&gt_set, &pred_set, &options)?;
            if json {
                println!("{}", report.to_json()?);
            } else {
                print!("{}", report.to_text_table());
            }
        }
        Command::Label {
            input,
            output,
            rmsd_max,
        } => {
            if !(rmsd_max > 0.0) {
                return Err(usage("label", format!("--rmsd-max must be positive, got {rmsd_max}")));
            }
            let text = std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let labeling = LandmarkFile::from_json(&text)
                .and_then(|f| f.into_input())
                .with_context(|| format!("parsing {}", input.display()))?;
            let (poses, stats) = labeling.label(rmsd_max)?;
            save_pose_csv(&poses, &output).with_context(|| format!("writing {}", output.display()))?;
            eprintln!(
                "{} frames, {} records written, {} skipped (rmsd {}, degenerate {})",
                stats.frames,
                stats.records,
                stats.skipped(),
                stats.skipped_rmsd,
                stats.skipped_degenerate
            );
        }
        Command::Bench(args) => bench::run(args)?,
        Command::DemoAmbiguity => {
            let witness = ambiguity_witness(&LEFT, &RIGHT)?;
            print!("{}", render(&LEFT, &RIGHT, &witness)?);
            if !witness.holds() {
                anyhow::bail!("ambiguity witness does not hold");
            }
        }
    }
    Ok(())
}
