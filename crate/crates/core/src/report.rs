//! The evaluation protocol and its JSON / text-table renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    bins_of, mae_of, maev_of, pair, BinStat, MaeSummary, MaevSummary, DEFAULT_BIN_RANGE,
    DEFAULT_BIN_WIDTH,
};
use crate::pose::PoseSet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    /// `None` wraps Euler differences only when some ground-truth angle lies
    /// outside `[−99, 99]`.
    pub wrap: Option<bool>,
    pub bin_width: f64,
    /// Evaluate the ids common to both sets instead of requiring equal sets.
    pub intersect: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            wrap: None,
            bin_width: DEFAULT_BIN_WIDTH,
            intersect: false,
        }
    }
}

/// Options as applied, with the wrap decision resolved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppliedOptions {
    pub wrap: bool,
    pub bin_width: f64,
    pub intersect: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub mae: MaeSummary,
    pub maev: MaevSummary,
    pub bins: Vec<BinStat>,
    pub n: usize,
    pub options: AppliedOptions,
}

pub fn evaluate(gt: &PoseSet, pred: &PoseSet, options: &EvalOptions) -> Result<ErrorReport> {
    let samples = if options.intersect {
        let mut gt = gt.clone();
        gt.retain_ids_of(pred);
        let mut pred = pred.clone();
        pred.retain_ids_of(&gt);
        if gt.is_empty() {
            return Err(Error::EmptySet);
        }
        pair(&gt, &pred)?
    } else {
        pair(gt, pred)?
    };

    let wrap = options.wrap.unwrap_or_else(|| {
        samples.iter().any(|s| {
            s.gt_euler
                .iter()
                .any(|a| *a < DEFAULT_BIN_RANGE.0 || *a > DEFAULT_BIN_RANGE.1)
        })
    });

    Ok(ErrorReport {
        mae: mae_of(&samples, wrap)?,
        maev: maev_of(&samples)?,
        bins: bins_of(&samples, options.bin_width, wrap)?,
        n: samples.len(),
        options: AppliedOptions {
            wrap,
            bin_width: options.bin_width,
            intersect: options.intersect,
        },
    })
}

impl ErrorReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Two-decimal summary table (Yaw, Pitch, Roll, MAE, Left, Down, Front,
    /// MAEV) followed by the per-interval breakdown.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        let headers = ["Yaw", "Pitch", "Roll", "MAE", "Left", "Down", "Front", "MAEV"];
        let values = [
            self.mae.yaw,
            self.mae.pitch,
            self.mae.roll,
            self.mae.overall,
            self.maev.left,
            self.maev.down,
            self.maev.front,
            self.maev.overall,
        ];
        for h in headers {
            let _ = write!(out, "{h:>8}");
        }
        out.push('\n');
        for v in values {
            let _ = write!(out, "{v:>8.2}");
        }
        out.push('\n');
        let _ = writeln!(out, "n = {}, wrap = {}", self.n, self.options.wrap);

        out.push('\n');
        let _ = writeln!(out, "{:>6}{:>10}{:>10}{:>8}{:>10}", "angle", "lo", "hi", "count", "mae");
        for b in &self.bins {
            let mae = b.mae.map_or_else(|| "-".to_string(), |m| format!("{m:.2}"));
            let _ = writeln!(
                out,
                "{:>6}{:>10.2}{:>10.2}{:>8}{:>10}",
                b.angle.to_string(),
                b.lo,
                b.hi,
                b.count,
                mae
            );
        }
        out
    }
}
