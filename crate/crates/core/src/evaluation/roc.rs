use std::io::Write;

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    /// Alert when `score >= threshold`. The leading origin point uses `+inf`
    /// and stands for "alert on nothing".
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve ordered by descending threshold, from (0, 0) to (1, 1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC curve and trapezoidal AUC of `(score, is_positive)` pairs.
///
/// Thresholds sweep the distinct scores from high to low; `+inf` ranks above
/// every finite score. Tied scores form one diagonal segment, which gives the
/// same area as half-credit for ties in the Mann-Whitney statistic. The area
/// is accumulated in integer counts and divided once, so tie-free inputs give
/// exactly the pairwise statistic.
pub fn roc_auc(scores: &[(f64, bool)]) -> Result<RocCurve> {
    if scores.iter().any(|(s, _)| s.is_nan()) {
        return Err(Error::InvalidConfig("ROC input contains a NaN score".into()));
    }
    let positives = scores.iter().filter(|(_, t)| *t).count() as u64;
    let negatives = scores.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateLabels);
    }

    let mut sorted: Vec<(f64, bool)> = scores.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    // twice the area, in units of (1 positive) x (1 negative)
    let mut area2: u128 = 0;
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        let (tp_before, fp_before) = (tp, fp);
        while i < sorted.len() && sorted[i].0 == threshold {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        area2 += (fp - fp_before) as u128 * (tp + tp_before) as u128;
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
        });
    }
    let auc = area2 as f64 / (2 * positives as u128 * negatives as u128) as f64;
    Ok(RocCurve { points, auc })
}

/// `threshold,fpr,tpr` rows followed by `# auc=<value>`.
pub fn write_roc_csv<W: Write>(curve: &RocCurve, mut out: W) -> Result<()> {
    writeln!(out, "threshold,fpr,tpr")?;
    for p in &curve.points {
        writeln!(out, "{},{},{}", p.threshold, p.fpr, p.tpr)?;
    }
    writeln!(out, "# auc={}", curve.auc)?;
    Ok(())
}
