use serde::Serialize;

use crate::detector::WindowScore;
use crate::{Error, Result};

/// Summary of the scores of valid windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceStats {
    pub average: f64,
    /// Mean of the two middle values for even counts.
    pub median: f64,
    pub minimum: f64,
    pub maximum: f64,
    /// Valid windows summarized.
    pub count: usize,
    /// Windows excluded because their histogram was empty.
    pub invalid: usize,
}

pub fn divergence_stats(scores: &[WindowScore]) -> Result<DivergenceStats> {
    let mut values: Vec<f64> = scores.iter().filter(|s| s.valid).map(|s| s.score).collect();
    if values.is_empty() {
        return Err(Error::EmptyStats);
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let median = if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    };
    Ok(DivergenceStats {
        average: values.iter().sum::<f64>() / n as f64,
        median,
        minimum: values[0],
        maximum: values[n - 1],
        count: n,
        invalid: scores.len() - n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::WindowIndex;

    fn scores(values: &[f64]) -> Vec<WindowScore> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| WindowScore {
                index: i,
                window: WindowIndex { start: i, end: i + 1 },
                score: v,
                decision: false,
                truth: None,
                valid: v.is_finite(),
            })
            .collect()
    }

    #[test]
    fn odd_count() {
        let s = divergence_stats(&scores(&[0.3, 0.1, 0.2])).unwrap();
        assert!((s.average - 0.2).abs() < 1e-15);
        assert_eq!((s.median, s.minimum, s.maximum), (0.2, 0.1, 0.3));
    }

    #[test]
    fn singleton() {
        let s = divergence_stats(&scores(&[0.5])).unwrap();
        assert_eq!((s.average, s.median, s.minimum, s.maximum), (0.5, 0.5, 0.5, 0.5));
    }

    #[test]
    fn even_count_median() {
        let s = divergence_stats(&scores(&[0.1, 0.3])).unwrap();
        assert!((s.median - 0.2).abs() < 1e-15);
    }

    #[test]
    fn invalid_windows_are_excluded() {
        let s = divergence_stats(&scores(&[0.1, f64::INFINITY])).unwrap();
        assert_eq!((s.count, s.invalid, s.maximum), (1, 1, 0.1));
        assert!(matches!(divergence_stats(&scores(&[f64::INFINITY])), Err(Error::EmptyStats)));
    }
}
