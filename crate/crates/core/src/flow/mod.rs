//! Canonical in-memory flow model and the parsers that feed it.
//!
//! Three external representations are supported: the canonical flow CSV
//! ([`parse_flow_csv`] / [`write_flow_csv`]), the text table printed by
//! `tshark -q -z conv,tcp` ([`parse_tshark_conversations`]) and KDD Cup 1999
//! connection records ([`adapt_kdd`]).

mod csv;
mod kdd;
mod order;
mod tshark;

use std::net::IpAddr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use self::csv::{parse_flow_csv, write_flow_csv, CANONICAL_COLUMNS};
pub use self::kdd::adapt_kdd;
pub use self::order::{order_flows, ordering_permutation, OrderingScheme};
pub use self::tshark::parse_tshark_conversations;

/// One bidirectional TCP flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub src_ip: IpAddr,
    pub src_port: u16,
    pub dst_ip: IpAddr,
    pub dst_port: u16,
    /// Total packets in both directions. Absent for sources that do not
    /// report packet counts (KDD Cup 1999).
    pub packets_total: Option<u64>,
    /// Total bytes in both directions.
    pub bytes_total: u64,
    /// Seconds since capture start.
    pub rel_start: f64,
    /// Seconds.
    pub duration: f64,
    /// `Some(true)` for malicious flows.
    pub label: Option<bool>,
    /// Position in the raw log; breaks ordering ties.
    pub seq_no: u64,
}

impl FlowRecord {
    pub fn rel_end(&self) -> f64 {
        self.rel_start + self.duration
    }
}

/// An ordered collection of flows.
///
/// `is_labeled()` holds only when every flow carries a label.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDataset {
    flows: Vec<FlowRecord>,
    labeled: bool,
    source_name: String,
}

impl FlowDataset {
    /// Builds a dataset; it counts as labeled when every flow has a label
    /// (vacuously true for an empty dataset).
    pub fn new(source_name: impl Into<String>, flows: Vec<FlowRecord>) -> Self {
        let labeled = flows.iter().all(|f| f.label.is_some());
        FlowDataset {
            flows,
            labeled,
            source_name: source_name.into(),
        }
    }

    /// Like [`FlowDataset::new`] but forces the dataset unlabeled when the
    /// source had no label column at all.
    pub(crate) fn with_label_column(source_name: impl Into<String>, flows: Vec<FlowRecord>, has_label_column: bool) -> Self {
        let mut dataset = Self::new(source_name, flows);
        dataset.labeled &= has_label_column;
        dataset
    }

    pub fn flows(&self) -> &[FlowRecord] {
        &self.flows
    }

    pub fn into_flows(self) -> Vec<FlowRecord> {
        self.flows
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        self.labeled
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn set_source_name(&mut self, name: impl Into<String>) {
        self.source_name = name.into();
    }

    /// True when every flow reports a packet count.
    pub fn has_packet_counts(&self) -> bool {
        self.flows.iter().all(|f| f.packets_total.is_some())
    }

    /// Per-flow ground truth in dataset order.
    pub fn labels(&self) -> Result<Vec<bool>> {
        if !self.labeled {
            return Err(Error::Unlabeled);
        }
        Ok(self.flows.iter().map(|f| f.label.unwrap_or(false)).collect())
    }

    pub fn malicious_count(&self) -> usize {
        self.flows.iter().filter(|f| f.label == Some(true)).count()
    }
}
