//! Benford reference distributions and empirical first-digit histograms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on the total mass of a caller-supplied distribution.
const MASS_TOLERANCE: f64 = 1e-9;

/// A leading decimal digit. 0 only arises from a zero value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digit(u8);

impl Digit {
    pub fn new(value: u8) -> Option<Digit> {
        (value <= 9).then_some(Digit(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How zero values (equal consecutive flow sizes) enter a histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroPolicy {
    /// Discard zeros; the histogram covers digits 1-9.
    SkipZeros,
    /// Count zeros as digit 0; the histogram covers digits 0-9.
    CountZeros,
}

impl ZeroPolicy {
    pub fn name(self) -> &'static str {
        match self {
            ZeroPolicy::SkipZeros => "skip",
            ZeroPolicy::CountZeros => "count",
        }
    }
}

impl fmt::Display for ZeroPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ZeroPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "skip" | "skip-zeros" => Ok(ZeroPolicy::SkipZeros),
            "count" | "count-zeros" => Ok(ZeroPolicy::CountZeros),
            other => Err(format!("unknown zero policy '{other}' (expected skip|count)")),
        }
    }
}

/// Probability mass over first digits.
///
/// Standard distributions cover digits 1-9 and report `p(0) == 0`; extended
/// ones also carry digit 0. `sample_count` is the number of values behind an
/// empirical histogram and 0 for analytic references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DigitDistribution {
    probs: [f64; 10],
    extended: bool,
    sample_count: u64,
}

impl DigitDistribution {
    /// A standard distribution from the masses of digits 1-9.
    pub fn standard(probs: [f64; 9]) -> Result<Self> {
        let mut all = [0.0; 10];
        all[1..].copy_from_slice(&probs);
        Self::checked(all, false)
    }

    /// An extended distribution from the masses of digits 0-9.
    pub fn extended(probs: [f64; 10]) -> Result<Self> {
        Self::checked(probs, true)
    }

    /// Builds from a slice of length 9 (standard) or 10 (extended).
    pub fn from_slice(probs: &[f64]) -> Result<Self> {
        match probs.len() {
            9 => Self::standard(probs.try_into().unwrap()),
            10 => Self::extended(probs.try_into().unwrap()),
            n => Err(Error::InvalidDistribution(format!("expected 9 or 10 entries, got {n}"))),
        }
    }

    fn checked(probs: [f64; 10], extended: bool) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}, not 1")));
        }
        Ok(DigitDistribution {
            probs,
            extended,
            sample_count: 0,
        })
    }

    /// Probability of `digit` (0-9).
    pub fn p(&self, digit: u8) -> f64 {
        self.probs[digit as usize]
    }

    /// Masses of digits 1-9, the range shared by every metric.
    pub fn significant(&self) -> &[f64] {
        &self.probs[1..]
    }

    /// Entries as stored: 9 values for standard, 10 for extended.
    pub fn as_slice(&self) -> &[f64] {
        if self.extended {
            &self.probs
        } else {
            &self.probs[1..]
        }
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    /// True for analytic references (no samples behind them).
    pub fn is_analytic(&self) -> bool {
        self.sample_count == 0
    }
}

/// Benford's law, `P(d) = log10(1 + 1/d)` for `d = 1..9`. The extended form
/// adds `P(0) = 0`.
pub fn benford_reference(extended: bool) -> DigitDistribution {
    let mut probs = [0.0; 10];
    for (d, p) in probs.iter_mut().enumerate().skip(1) {
        *p = (1.0 + 1.0 / d as f64).log10();
    }
    DigitDistribution {
        probs,
        extended,
        sample_count: 0,
    }
}

/// Leading decimal digit of `n`; 0 maps to digit 0.
pub fn first_digit(mut n: u64) -> Digit {
    while n >= 10 {
        n /= 10;
    }
    Digit(n as u8)
}

/// Empirical first-digit distribution of `values` under `policy`.
///
/// Fails with [`Error::EmptyHistogram`] when nothing is left to normalize
/// (empty input, or only zeros under [`ZeroPolicy::SkipZeros`]).
pub fn digit_histogram(values: &[u64], policy: ZeroPolicy) -> Result<DigitDistribution> {
    let mut counts = [0u64; 10];
    for &v in values {
        counts[first_digit(v).0 as usize] += 1;
    }
    let extended = policy == ZeroPolicy::CountZeros;
    if !extended {
        counts[0] = 0;
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let mut probs = [0.0; 10];
    for (p, &c) in probs.iter_mut().zip(&counts) {
        *p = c as f64 / total as f64;
    }
    Ok(DigitDistribution {
        probs,
        extended,
        sample_count: total,
    })
}
