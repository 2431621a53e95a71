use std::io::Read;
use std::net::{IpAddr, Ipv4Addr};

use csv::{ReaderBuilder, Trim};

use super::csv::parse_count;
use super::{FlowDataset, FlowRecord};
use crate::{Error, Result};

const FIELDS: usize = 42;
const PROTOCOL: usize = 1;
const SRC_BYTES: usize = 4;
const DST_BYTES: usize = 5;
const CLASS: usize = 41;

/// Converts KDD Cup 1999 connection records into TCP flows.
///
/// Non-TCP rows are dropped. The format carries neither timestamps, packet
/// counts nor endpoints: `rel_start` and `seq_no` are the raw row index,
/// `duration` is 0, `packets_total` is absent and endpoints are unspecified.
/// Class `normal.` maps to label 0, every other class to 1.
pub fn adapt_kdd<R: Read>(input: R) -> Result<FlowDataset> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(input);

    let unspecified = IpAddr::V4(Ipv4Addr::UNSPECIFIED);
    let mut flows = Vec::new();
    let mut row_index = 0u64;
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() < FIELDS {
            return Err(Error::parse(
                line,
                format!("KDD record needs {FIELDS} fields, found {}", rec.len()),
            ));
        }
        let index = row_index;
        row_index += 1;
        if !rec[PROTOCOL].eq_ignore_ascii_case("tcp") {
            continue;
        }
        let src = parse_count(&rec[SRC_BYTES], "src_bytes", line)?;
        let dst = parse_count(&rec[DST_BYTES], "dst_bytes", line)?;
        let class = rec[CLASS].trim_end_matches('.');
        flows.push(FlowRecord {
            src_ip: unspecified,
            src_port: 0,
            dst_ip: unspecified,
            dst_port: 0,
            packets_total: None,
            bytes_total: src
                .checked_add(dst)
                .ok_or_else(|| Error::parse(line, "byte total overflows"))?,
            rel_start: index as f64,
            duration: 0.0,
            label: Some(class != "normal"),
            seq_no: index,
        });
    }
    Ok(FlowDataset::new("kdd", flows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(protocol: &str, src: &str, dst: &str, class: &str) -> String {
        let mut fields = vec!["0".to_string(); FIELDS];
        fields[PROTOCOL] = protocol.into();
        fields[2] = "http".into();
        fields[3] = "SF".into();
        fields[SRC_BYTES] = src.into();
        fields[DST_BYTES] = dst.into();
        fields[CLASS] = class.into();
        fields.join(",") + "\n"
    }

    #[test]
    fn tcp_normal_row() {
        let ds = adapt_kdd(row("tcp", "181", "5450", "normal.").as_bytes()).unwrap();
        let f = &ds.flows()[0];
        assert_eq!(f.bytes_total, 5631);
        assert_eq!(f.label, Some(false));
        assert_eq!(f.packets_total, None);
        assert!(ds.is_labeled());
        assert!(!ds.has_packet_counts());
    }

    #[test]
    fn udp_rows_are_dropped_but_keep_row_index() {
        let text = row("udp", "1", "1", "normal.") + &row("tcp", "1", "2", "neptune.");
        let ds = adapt_kdd(text.as_bytes()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.flows()[0].label, Some(true));
        assert_eq!(ds.flows()[0].rel_start, 1.0);
        assert_eq!(ds.flows()[0].seq_no, 1);
    }

    #[test]
    fn short_row_is_error() {
        assert!(matches!(adapt_kdd("0,tcp,http,SF,1,2\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn non_integer_bytes_is_error() {
        let text = row("tcp", "1.5", "2", "normal.");
        assert!(matches!(adapt_kdd(text.as_bytes()), Err(Error::Parse { .. })));
    }
}
