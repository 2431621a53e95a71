use std::io::Write;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::detector::{resolve_labeling_threshold, run_detector, DetectorConfig, Labeling};
use crate::flow::{ordering_permutation, FlowDataset};
use crate::pipeline::WindowSpec;
use crate::similarity::SimilarityMetric;
use crate::{Error, Result};

use super::roc::roc_auc;

/// Window sizes evaluated by [`grid_evaluate`] by default.
pub const WINDOW_GRID: [usize; 6] = [100, 200, 500, 1000, 2500, 5000];

pub const RELATIVE_LABELING_GRID: [f64; 22] = [
    0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7,
    0.8, 0.9,
];

pub const ABSOLUTE_LABELING_GRID: [u32; 32] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000,
    2000, 3000, 4000, 5000,
];

/// Both standard labeling grids, relative first.
pub fn standard_labeling_grid() -> Vec<Labeling> {
    RELATIVE_LABELING_GRID
        .iter()
        .map(|&t| Labeling::Relative(t))
        .chain(ABSOLUTE_LABELING_GRID.iter().map(|&t| Labeling::Absolute(t)))
        .collect()
}

/// Slide step for window size `w` keeping the base config's step/size ratio.
fn scaled_step(base: WindowSpec, w: usize) -> usize {
    if base.step() == 1 {
        return 1;
    }
    let ratio = base.step() as f64 / base.size() as f64;
    ((w as f64 * ratio).round() as usize).clamp(1, w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub w: usize,
    /// Mean score of valid windows; absent when no valid window exists.
    pub mean_score: Option<f64>,
    pub windows: usize,
}

/// Mean anomaly score per window size over `dataset`, ordered like `w_grid`.
///
/// Each size slides by the same fraction of the window as `config` does.
pub fn window_size_sweep(dataset: &FlowDataset, config: &DetectorConfig, w_grid: &[usize]) -> Result<Vec<SweepCell>> {
    if let Some(&w) = w_grid.iter().find(|&&w| w == 0) {
        return Err(Error::InvalidConfig(format!("window size must be at least 1, got {w}")));
    }
    w_grid
        .par_iter()
        .map(|&w| {
            let cfg = DetectorConfig {
                window: WindowSpec::new(w, scaled_step(config.window, w))?,
                labeling: Labeling::Relative(1.0),
                ..*config
            };
            let scores = run_detector(dataset, &cfg)?;
            let valid: Vec<f64> = scores.iter().filter(|s| s.valid).map(|s| s.score).collect();
            let mean_score = (!valid.is_empty()).then(|| valid.iter().sum::<f64>() / valid.len() as f64);
            if mean_score.is_none() {
                warn!("window size {w}: no valid windows over {} flows", dataset.len());
            }
            Ok(SweepCell {
                w,
                mean_score,
                windows: scores.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub w: usize,
    pub labeling: Labeling,
    pub metric: SimilarityMetric,
    pub auc: Option<f64>,
    /// Why `auc` is absent.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResult {
    /// Ordered by window size, then labeling, then metric.
    pub cells: Vec<GridCell>,
}

impl GridResult {
    /// Cell with the highest AUC; the first one wins ties.
    pub fn best(&self) -> Option<&GridCell> {
        self.cells
            .iter()
            .filter(|c| c.auc.is_some())
            .fold(None, |best: Option<&GridCell>, c| match best {
                Some(b) if b.auc >= c.auc => Some(b),
                _ => Some(c),
            })
    }
}

/// AUC for every (window size, labeling, metric) combination.
///
/// Scores are computed once per window size and metric and reused across
/// labelings. Window size and slide step follow [`window_size_sweep`]; the
/// remaining knobs come from `base`. Combinations that cannot be evaluated
/// keep a reason instead of an AUC.
pub fn grid_evaluate(
    dataset: &FlowDataset,
    base: &DetectorConfig,
    w_grid: &[usize],
    labelings: &[Labeling],
    metrics: &[SimilarityMetric],
) -> Result<GridResult> {
    if !dataset.is_labeled() {
        return Err(Error::Unlabeled);
    }
    for l in labelings {
        match *l {
            Labeling::Absolute(0) => return Err(Error::InvalidConfig("absolute labeling threshold must be at least 1".into())),
            Labeling::Relative(t) if !(t > 0.0 && t <= 1.0) => {
                return Err(Error::InvalidConfig(format!("relative labeling threshold must be in (0, 1], got {t}")))
            }
            _ => {}
        }
    }
    let labels = dataset.labels()?;
    let order = ordering_permutation(dataset.flows(), base.ordering);
    let mut prefix = Vec::with_capacity(order.len() + 1);
    prefix.push(0u32);
    for &i in &order {
        prefix.push(prefix.last().unwrap() + u32::from(labels[i]));
    }

    let jobs: Vec<(usize, SimilarityMetric)> = w_grid.iter().flat_map(|&w| metrics.iter().map(move |&m| (w, m))).collect();
    let per_job: Vec<Vec<GridCell>> = jobs
        .par_iter()
        .map(|&(w, metric)| {
            let cfg = DetectorConfig {
                window: WindowSpec::new(w, scaled_step(base.window, w))?,
                metric,
                labeling: Labeling::Relative(1.0),
                ..*base
            };
            let scores = run_detector(dataset, &cfg)?;
            let cells = labelings
                .iter()
                .map(|&labeling| {
                    let absent = |reason: String| GridCell {
                        w,
                        labeling,
                        metric,
                        auc: None,
                        reason: Some(reason),
                    };
                    if let Labeling::Absolute(t) = labeling {
                        if t as usize > w {
                            return absent(format!("labeling threshold {t} exceeds window size {w}"));
                        }
                    }
                    if scores.is_empty() {
                        return absent(format!("no complete window of {w} flows"));
                    }
                    let t_l = resolve_labeling_threshold(labeling, w);
                    let pairs: Vec<(f64, bool)> = scores
                        .iter()
                        .map(|s| (s.score, prefix[s.window.end] - prefix[s.window.start] >= t_l))
                        .collect();
                    match roc_auc(&pairs) {
                        Ok(curve) => GridCell {
                            w,
                            labeling,
                            metric,
                            auc: Some(curve.auc),
                            reason: None,
                        },
                        Err(Error::DegenerateLabels) => absent("windows are all of one class".into()),
                        Err(e) => absent(e.to_string()),
                    }
                })
                .collect();
            Ok(cells)
        })
        .collect::<Result<_>>()?;

    // regroup from (w, metric, labeling) to (w, labeling, metric)
    let mut cells = Vec::with_capacity(per_job.len() * labelings.len());
    for group in per_job.chunks(metrics.len().max(1)) {
        for li in 0..labelings.len() {
            cells.extend(group.iter().map(|job| job[li].clone()));
        }
    }
    for c in &cells {
        if let Some(reason) = &c.reason {
            warn!("w={} {} {}: {reason}", c.w, c.labeling, c.metric);
        }
    }
    Ok(GridResult { cells })
}

pub fn write_grid_csv<W: Write>(grid: &GridResult, mut out: W) -> Result<()> {
    writeln!(out, "w,labeling,metric,auc")?;
    for c in &grid.cells {
        let auc = c.auc.map(|a| a.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{}", c.w, c.labeling, c.metric, auc)?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(cells: &[SweepCell], mut out: W) -> Result<()> {
    writeln!(out, "w,mean_score")?;
    for c in cells {
        let mean = c.mean_score.map(|m| m.to_string()).unwrap_or_default();
        writeln!(out, "{},{}", c.w, mean)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(standard_labeling_grid().len(), 54);
        assert!(RELATIVE_LABELING_GRID.windows(2).all(|p| p[0] < p[1]));
        assert!(ABSOLUTE_LABELING_GRID.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn step_scaling() {
        let half = WindowSpec::new(2500, 1250).unwrap();
        assert_eq!(scaled_step(half, 1000), 500);
        assert_eq!(scaled_step(half, 1), 1);
        assert_eq!(scaled_step(WindowSpec::new(10, 1).unwrap(), 5000), 1);
        assert_eq!(scaled_step(WindowSpec::new(10, 10).unwrap(), 300), 300);
    }

    #[test]
    fn best_prefers_first_on_ties() {
        let cell = |w, auc| GridCell {
            w,
            labeling: Labeling::Absolute(1),
            metric: SimilarityMetric::ChiSquare,
            auc,
            reason: None,
        };
        let grid = GridResult {
            cells: vec![cell(1, None), cell(2, Some(0.7)), cell(3, Some(0.9)), cell(4, Some(0.9))],
        };
        assert_eq!(grid.best().unwrap().w, 3);
    }
}
