//! Flow sizes, flow-size differences and sliding flow windows.
//!
//! Windows are counted in flows: a window of `w` flows yields `w - 1`
//! differences, and differences never straddle two windows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::flow::FlowDataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SizeUnit {
    Bytes,
    Packets,
}

impl SizeUnit {
    pub fn name(self) -> &'static str {
        match self {
            SizeUnit::Bytes => "bytes",
            SizeUnit::Packets => "packets",
        }
    }
}

impl fmt::Display for SizeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SizeUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bytes" | "byte" => Ok(SizeUnit::Bytes),
            "packets" | "packet" => Ok(SizeUnit::Packets),
            other => Err(format!("unknown size unit '{other}' (expected bytes|packets)")),
        }
    }
}

/// Window length `w` and slide step `s`, both in flows, with `1 <= s <= w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowSpec {
    w: usize,
    s: usize,
}

impl WindowSpec {
    pub fn new(w: usize, s: usize) -> Result<Self> {
        if w == 0 {
            return Err(Error::InvalidConfig("window size must be at least 1".into()));
        }
        if s == 0 || s > w {
            return Err(Error::InvalidConfig(format!("slide step must be in 1..={w}, got {s}")));
        }
        Ok(WindowSpec { w, s })
    }

    /// Window of `w` flows sliding by `w / 2` (at least 1).
    pub fn half_step(w: usize) -> Result<Self> {
        Self::new(w, (w / 2).max(1))
    }

    pub fn size(&self) -> usize {
        self.w
    }

    pub fn step(&self) -> usize {
        self.s
    }
}

/// Half-open flow index range `[start, end)` of one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowIndex {
    pub start: usize,
    pub end: usize,
}

impl WindowIndex {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Per-flow sizes in dataset order.
pub fn size_sequence(dataset: &FlowDataset, unit: SizeUnit) -> Result<Vec<u64>> {
    match unit {
        SizeUnit::Bytes => Ok(dataset.flows().iter().map(|f| f.bytes_total).collect()),
        SizeUnit::Packets => dataset
            .flows()
            .iter()
            .map(|f| f.packets_total.ok_or(Error::MissingPacketCounts))
            .collect(),
    }
}

/// `|sizes[i+1] - sizes[i]|` for each consecutive pair.
pub fn difference_sequence(sizes: &[u64]) -> Vec<u64> {
    sizes.windows(2).map(|pair| pair[0].abs_diff(pair[1])).collect()
}

/// Complete windows over `n_flows` flows starting at `0, s, 2s, ...`.
pub fn windows(n_flows: usize, spec: WindowSpec) -> Vec<WindowIndex> {
    if n_flows < spec.w {
        return Vec::new();
    }
    (0..=n_flows - spec.w)
        .step_by(spec.s)
        .map(|start| WindowIndex {
            start,
            end: start + spec.w,
        })
        .collect()
}

/// Differences between consecutive flows inside `window` only.
pub fn window_differences(dataset: &FlowDataset, unit: SizeUnit, window: WindowIndex) -> Result<Vec<u64>> {
    let flows = dataset
        .flows()
        .get(window.start..window.end)
        .ok_or_else(|| Error::InvalidConfig(format!("window {}..{} exceeds {} flows", window.start, window.end, dataset.len())))?;
    let sizes = match unit {
        SizeUnit::Bytes => flows.iter().map(|f| f.bytes_total).collect::<Vec<_>>(),
        SizeUnit::Packets => flows
            .iter()
            .map(|f| f.packets_total.ok_or(Error::MissingPacketCounts))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(difference_sequence(&sizes))
}
