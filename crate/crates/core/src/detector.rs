//! Window scoring, alert decisions and window ground truth.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benford::{benford_reference, digit_histogram, ZeroPolicy};
use crate::flow::{ordering_permutation, FlowDataset, OrderingScheme};
use crate::pipeline::{difference_sequence, window_differences, windows, SizeUnit, WindowIndex, WindowSpec};
use crate::similarity::{anomaly_score, KldParams, SimilarityMetric};
use crate::{Error, Result};

/// Slack for float products such as `0.07 * 100` when rounding up relative
/// labeling thresholds.
const RELATIVE_EPSILON: f64 = 1e-9;

/// Minimum number of malicious flows that makes a window malicious, either
/// absolute (`T_l`) or as a fraction of the window (`t_l`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Labeling {
    Absolute(u32),
    Relative(f64),
}

impl Labeling {
    fn validate(self, w: usize) -> Result<()> {
        match self {
            Labeling::Absolute(t) if t == 0 || t as usize > w => Err(Error::InvalidConfig(format!(
                "absolute labeling threshold must be in 1..={w}, got {t}"
            ))),
            Labeling::Relative(t) if !(t > 0.0 && t <= 1.0) => Err(Error::InvalidConfig(format!(
                "relative labeling threshold must be in (0, 1], got {t}"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Labeling::Absolute(t) => write!(f, "abs:{t}"),
            Labeling::Relative(t) => write!(f, "rel:{t}"),
        }
    }
}

impl FromStr for Labeling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid labeling '{s}' (expected abs:<count> or rel:<fraction>)");
        match s.split_once(':') {
            Some(("abs", v)) => v.parse().map(Labeling::Absolute).map_err(|_| bad()),
            Some(("rel", v)) => v.parse().map(Labeling::Relative).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

/// Every knob of one detector run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub window: WindowSpec,
    pub unit: SizeUnit,
    pub zero_policy: ZeroPolicy,
    pub ordering: OrderingScheme,
    pub metric: SimilarityMetric,
    pub kld: KldParams,
    /// Alert when the anomaly score is at least this value.
    pub threshold_t: f64,
    pub labeling: Labeling,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            window: WindowSpec::new(2500, 1250).unwrap(),
            unit: SizeUnit::Bytes,
            zero_policy: ZeroPolicy::CountZeros,
            ordering: OrderingScheme::StartEnd,
            metric: SimilarityMetric::ChiSquare,
            kld: KldParams::default(),
            threshold_t: 0.4,
            labeling: Labeling::Relative(0.2),
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        WindowSpec::new(self.window.size(), self.window.step())?;
        KldParams::new(self.kld.theta)?;
        if !(self.threshold_t.is_finite() && self.threshold_t >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "decision threshold must be finite and non-negative, got {}",
                self.threshold_t
            )));
        }
        self.labeling.validate(self.window.size())
    }
}

/// One scored window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowScore {
    /// Position of the window in the run.
    pub index: usize,
    pub window: WindowIndex,
    /// Oriented anomaly score; `+inf` for invalid windows.
    pub score: f64,
    pub decision: bool,
    /// Ground truth, present when the dataset is labeled.
    pub truth: Option<bool>,
    /// False when the window's digit histogram was empty.
    pub valid: bool,
}

fn score_differences(diffs: &[u64], config: &DetectorConfig) -> (f64, bool) {
    match digit_histogram(diffs, config.zero_policy) {
        Ok(obs) => {
            let raw = config.metric.evaluate(&obs, &benford_reference(false), config.kld);
            (anomaly_score(config.metric, raw), true)
        }
        // No significant digits at all: every flow in the window had the
        // same size. Treat as maximally anomalous.
        Err(_) => (f64::INFINITY, false),
    }
}

/// Scores one window of `dataset` in its current flow order. `truth` is left
/// empty.
pub fn score_window(dataset: &FlowDataset, config: &DetectorConfig, window: WindowIndex) -> Result<WindowScore> {
    let diffs = window_differences(dataset, config.unit, window)?;
    let (score, valid) = score_differences(&diffs, config);
    Ok(WindowScore {
        index: window.start / config.window.step(),
        window,
        score,
        decision: score >= config.threshold_t,
        truth: None,
        valid,
    })
}

/// Absolute labeling threshold for windows of `w` flows. Relative thresholds
/// round up and are clamped to `1..=w`.
pub fn resolve_labeling_threshold(labeling: Labeling, w: usize) -> u32 {
    match labeling {
        Labeling::Absolute(t) => t,
        Labeling::Relative(t) => {
            let raw = (t * w as f64 - RELATIVE_EPSILON).ceil();
            raw.clamp(1.0, w.max(1) as f64) as u32
        }
    }
}

/// A window is malicious when it holds at least `t_l_abs` malicious flows.
pub fn label_window(flow_labels: &[bool], window: WindowIndex, t_l_abs: u32) -> bool {
    let malicious = flow_labels[window.start..window.end].iter().filter(|&&l| l).count();
    malicious >= t_l_abs as usize
}

/// Orders the flows, then scores every window (in parallel) and attaches
/// ground truth when the dataset is labeled. Output is ordered by window
/// start and independent of thread scheduling.
pub fn run_detector(dataset: &FlowDataset, config: &DetectorConfig) -> Result<Vec<WindowScore>> {
    config.validate()?;
    let order = ordering_permutation(dataset.flows(), config.ordering);
    let flows = dataset.flows();
    let sizes: Vec<u64> = match config.unit {
        SizeUnit::Bytes => order.iter().map(|&i| flows[i].bytes_total).collect(),
        SizeUnit::Packets => order
            .iter()
            .map(|&i| flows[i].packets_total.ok_or(Error::MissingPacketCounts))
            .collect::<Result<_>>()?,
    };
    // prefix[i] = malicious flows among the first i ordered flows
    let prefix: Option<Vec<u32>> = dataset.is_labeled().then(|| {
        let mut acc = 0u32;
        std::iter::once(0)
            .chain(order.iter().map(|&i| {
                acc += u32::from(flows[i].label == Some(true));
                acc
            }))
            .collect()
    });
    let t_l = resolve_labeling_threshold(config.labeling, config.window.size());

    let scores = windows(sizes.len(), config.window)
        .into_par_iter()
        .enumerate()
        .map(|(index, window)| {
            let diffs = difference_sequence(&sizes[window.start..window.end]);
            let (score, valid) = score_differences(&diffs, config);
            WindowScore {
                index,
                window,
                score,
                decision: score >= config.threshold_t,
                truth: prefix.as_ref().map(|p| p[window.end] - p[window.start] >= t_l),
                valid,
            }
        })
        .collect();
    Ok(scores)
}

/// Recomputes window truth under another labeling threshold, reusing scores.
pub fn relabel(dataset: &FlowDataset, config: &DetectorConfig, scores: &mut [WindowScore], labeling: Labeling) -> Result<()> {
    let order = ordering_permutation(dataset.flows(), config.ordering);
    let labels = dataset.labels()?;
    let ordered: Vec<bool> = order.iter().map(|&i| labels[i]).collect();
    let t_l = resolve_labeling_threshold(labeling, config.window.size());
    for s in scores {
        s.truth = Some(label_window(&ordered, s.window, t_l));
    }
    Ok(())
}

/// Writes the window-score CSV.
pub fn write_window_scores<W: Write>(scores: &[WindowScore], mut out: W) -> Result<()> {
    writeln!(out, "window_index,start_flow,end_flow,score,decision,truth,valid")?;
    for s in scores {
        let truth = match s.truth {
            Some(t) => u8::from(t).to_string(),
            None => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.index,
            s.window.start,
            s.window.end,
            s.score,
            u8::from(s.decision),
            truth,
            u8::from(s.valid)
        )?;
    }
    Ok(())
}
