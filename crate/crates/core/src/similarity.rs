//! Goodness-of-fit between an observed first-digit distribution and the
//! Benford reference.
//!
//! All metrics work on digits 1-9. Extended observations contribute their raw
//! 1-9 masses (which sum to `1 - P̂(0)`) without renormalization, so digit-0
//! mass still pulls them away from the reference. Only the modified
//! Kullback-Leibler divergence charges `P̂(0)` explicitly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benford::{benford_reference, DigitDistribution};
use crate::{Error, Result};

/// Below this, an observed vector is treated as constant by [`pearson_cc`].
const ZERO_VARIANCE: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityMetric {
    ChiSquare,
    Euclidean,
    Manhattan,
    Canberra,
    PearsonCC,
    Cosine,
    ModifiedKLD,
}

impl SimilarityMetric {
    pub const ALL: [SimilarityMetric; 7] = [
        SimilarityMetric::ChiSquare,
        SimilarityMetric::Euclidean,
        SimilarityMetric::Manhattan,
        SimilarityMetric::Canberra,
        SimilarityMetric::PearsonCC,
        SimilarityMetric::Cosine,
        SimilarityMetric::ModifiedKLD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityMetric::ChiSquare => "chi2",
            SimilarityMetric::Euclidean => "euclidean",
            SimilarityMetric::Manhattan => "manhattan",
            SimilarityMetric::Canberra => "canberra",
            SimilarityMetric::PearsonCC => "pearson",
            SimilarityMetric::Cosine => "cosine",
            SimilarityMetric::ModifiedKLD => "mkld",
        }
    }

    /// Similarities peak at 1 for a perfect fit; divergences bottom out at 0.
    pub fn is_similarity(self) -> bool {
        matches!(self, SimilarityMetric::PearsonCC | SimilarityMetric::Cosine)
    }

    /// Raw metric value of `obs` against `reference`.
    pub fn evaluate(self, obs: &DigitDistribution, reference: &DigitDistribution, kld: KldParams) -> f64 {
        match self {
            SimilarityMetric::ChiSquare => chi_square(obs, reference),
            SimilarityMetric::Euclidean => euclidean(obs, reference),
            SimilarityMetric::Manhattan => manhattan(obs, reference),
            SimilarityMetric::Canberra => canberra(obs, reference),
            SimilarityMetric::PearsonCC => pearson_cc(obs, reference),
            SimilarityMetric::Cosine => cosine(obs, reference),
            SimilarityMetric::ModifiedKLD => modified_kld(obs, reference, kld),
        }
    }

    /// Oriented deviation of `obs` from the standard Benford reference.
    pub fn score(self, obs: &DigitDistribution, kld: KldParams) -> f64 {
        anomaly_score(self, self.evaluate(obs, &benford_reference(false), kld))
    }
}

impl fmt::Display for SimilarityMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimilarityMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "chi2" | "chi-square" | "chisquare" => SimilarityMetric::ChiSquare,
            "euclidean" | "ed" => SimilarityMetric::Euclidean,
            "manhattan" | "md" => SimilarityMetric::Manhattan,
            "canberra" | "cd" => SimilarityMetric::Canberra,
            "pearson" | "cc" | "pearsoncc" => SimilarityMetric::PearsonCC,
            "cosine" | "cs" => SimilarityMetric::Cosine,
            "mkld" | "kld" | "modified-kld" => SimilarityMetric::ModifiedKLD,
            other => return Err(format!("unknown metric '{other}'")),
        })
    }
}

/// Parameters of the modified Kullback-Leibler divergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KldParams {
    /// Divergence charged per unit of digit-0 mass.
    pub theta: f64,
}

impl KldParams {
    pub fn new(theta: f64) -> Result<Self> {
        if theta.is_finite() && theta > 0.0 {
            Ok(KldParams { theta })
        } else {
            Err(Error::InvalidConfig(format!("KLD theta must be positive, got {theta}")))
        }
    }
}

impl Default for KldParams {
    /// `2 * log2(1 / P(9))`: all mass on digit 0 counts twice as much as all
    /// mass on digit 9.
    fn default() -> Self {
        let p9 = benford_reference(false).p(9);
        KldParams {
            theta: 2.0 * (1.0 / p9).log2(),
        }
    }
}

fn pairs<'a>(obs: &'a DigitDistribution, reference: &'a DigitDistribution) -> impl Iterator<Item = (f64, f64)> + 'a {
    obs.significant().iter().copied().zip(reference.significant().iter().copied())
}

/// `Σ (P̂d - Pd)² / Pd` over digits 1-9.
pub fn chi_square(obs: &DigitDistribution, reference: &DigitDistribution) -> f64 {
    pairs(obs, reference).map(|(o, p)| (o - p) * (o - p) / p).sum()
}

pub fn euclidean(obs: &DigitDistribution, reference: &DigitDistribution) -> f64 {
    pairs(obs, reference).map(|(o, p)| (o - p) * (o - p)).sum::<f64>().sqrt()
}

pub fn manhattan(obs: &DigitDistribution, reference: &DigitDistribution) -> f64 {
    pairs(obs, reference).map(|(o, p)| (o - p).abs()).sum()
}

/// Terms with a zero denominator contribute 0.
pub fn canberra(obs: &DigitDistribution, reference: &DigitDistribution) -> f64 {
    pairs(obs, reference)
        .map(|(o, p)| if o + p > 0.0 { (o - p).abs() / (o + p) } else { 0.0 })
        .sum()
}

/// Sample correlation of the two 9-vectors. A constant observed vector has no
/// defined correlation and yields 0.
pub fn pearson_cc(obs: &DigitDistribution, reference: &DigitDistribution) -> f64 {
    let n = 9.0;
    let mean_o = obs.significant().iter().sum::<f64>() / n;
    let mean_p = reference.significant().iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (o, p) in pairs(obs, reference) {
        let (dx, dy) = (o - mean_o, p - mean_p);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= ZERO_VARIANCE || syy <= ZERO_VARIANCE {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Cosine of the angle between the 1-9 vectors; 0 when the observation has
/// no mass on digits 1-9.
pub fn cosine(obs: &DigitDistribution, reference: &DigitDistribution) -> f64 {
    let (mut dot, mut oo, mut pp) = (0.0, 0.0, 0.0);
    for (o, p) in pairs(obs, reference) {
        dot += o * p;
        oo += o * o;
        pp += p * p;
    }
    if oo == 0.0 || pp == 0.0 {
        return 0.0;
    }
    (dot / (oo.sqrt() * pp.sqrt())).clamp(0.0, 1.0)
}

/// `P̂0·θ + sqrt(max(0, Σ P̂d·log2(P̂d/Pd)))` over digits 1-9, with
/// `0·log2(0) = 0`.
///
/// With digit-0 mass present the 1-9 masses sum below one and the sum can go
/// negative; it is clamped at 0 since `P̂0·θ` already charges that mass.
pub fn modified_kld(obs: &DigitDistribution, reference: &DigitDistribution, params: KldParams) -> f64 {
    let sum: f64 = pairs(obs, reference)
        .filter(|(o, _)| *o > 0.0)
        .map(|(o, p)| o * (o / p).log2())
        .sum();
    obs.p(0) * params.theta + sum.max(0.0).sqrt()
}

/// Orients a raw metric value so that 0 is a perfect fit and larger is more
/// anomalous. Divergences pass through; similarities map to `1 - raw`, with
/// negative correlations clamped to 0 first.
pub fn anomaly_score(metric: SimilarityMetric, raw: f64) -> f64 {
    if metric.is_similarity() {
        (1.0 - raw.clamp(0.0, 1.0)).max(0.0)
    } else {
        raw
    }
}
