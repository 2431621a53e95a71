use std::cmp::Ordering;
use std::fmt;
use std::net::IpAddr;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{FlowDataset, FlowRecord};

/// The four flow orderings. Attributes are compared left to right; flows
/// with equal keys keep raw-log order (ascending `seq_no`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingScheme {
    /// (start time, end time)
    StartEnd,
    /// (end time, start time)
    EndStart,
    /// (source IP, destination IP, start time)
    SrcDstStart,
    /// (source IP, source port, destination IP, destination port, start time)
    FiveTupleStart,
}

impl OrderingScheme {
    pub const ALL: [OrderingScheme; 4] = [
        OrderingScheme::StartEnd,
        OrderingScheme::EndStart,
        OrderingScheme::SrcDstStart,
        OrderingScheme::FiveTupleStart,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderingScheme::StartEnd => "start-end",
            OrderingScheme::EndStart => "end-start",
            OrderingScheme::SrcDstStart => "src-dst-start",
            OrderingScheme::FiveTupleStart => "five-tuple-start",
        }
    }

    fn compare(self, a: &FlowRecord, b: &FlowRecord) -> Ordering {
        let key = match self {
            OrderingScheme::StartEnd => a
                .rel_start
                .total_cmp(&b.rel_start)
                .then(a.rel_end().total_cmp(&b.rel_end())),
            OrderingScheme::EndStart => a
                .rel_end()
                .total_cmp(&b.rel_end())
                .then(a.rel_start.total_cmp(&b.rel_start)),
            OrderingScheme::SrcDstStart => cmp_ip(&a.src_ip, &b.src_ip)
                .then_with(|| cmp_ip(&a.dst_ip, &b.dst_ip))
                .then(a.rel_start.total_cmp(&b.rel_start)),
            OrderingScheme::FiveTupleStart => cmp_ip(&a.src_ip, &b.src_ip)
                .then(a.src_port.cmp(&b.src_port))
                .then_with(|| cmp_ip(&a.dst_ip, &b.dst_ip))
                .then(a.dst_port.cmp(&b.dst_port))
                .then(a.rel_start.total_cmp(&b.rel_start)),
        };
        key.then(a.seq_no.cmp(&b.seq_no))
    }
}

impl fmt::Display for OrderingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderingScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "start-end" | "1" => Ok(OrderingScheme::StartEnd),
            "end-start" | "2" => Ok(OrderingScheme::EndStart),
            "src-dst-start" | "3" => Ok(OrderingScheme::SrcDstStart),
            "five-tuple-start" | "5-tuple-start" | "4" => Ok(OrderingScheme::FiveTupleStart),
            other => Err(format!("unknown ordering scheme '{other}'")),
        }
    }
}

/// Addresses compare as their canonical byte strings (4 or 16 octets).
fn cmp_ip(a: &IpAddr, b: &IpAddr) -> Ordering {
    fn octets(ip: &IpAddr) -> ([u8; 16], usize) {
        let mut buf = [0u8; 16];
        match ip {
            IpAddr::V4(v4) => {
                buf[..4].copy_from_slice(&v4.octets());
                (buf, 4)
            }
            IpAddr::V6(v6) => (v6.octets(), 16),
        }
    }
    let (a, alen) = octets(a);
    let (b, blen) = octets(b);
    a[..alen].cmp(&b[..blen])
}

/// Indices into `flows` listing them in `scheme` order.
pub fn ordering_permutation(flows: &[FlowRecord], scheme: OrderingScheme) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..flows.len()).collect();
    idx.sort_by(|&i, &j| scheme.compare(&flows[i], &flows[j]));
    idx
}

/// Reorders the dataset's flows under `scheme`.
pub fn order_flows(dataset: FlowDataset, scheme: OrderingScheme) -> FlowDataset {
    let FlowDataset {
        mut flows,
        labeled,
        source_name,
    } = dataset;
    flows.sort_by(|a, b| scheme.compare(a, b));
    FlowDataset {
        flows,
        labeled,
        source_name,
    }
}
