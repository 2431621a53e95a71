use std::io::{Read, Write};
use std::net::IpAddr;
use std::str::FromStr;

use csv::{ReaderBuilder, StringRecord, Trim};

use super::{FlowDataset, FlowRecord};
use crate::{Error, Result};

/// Header of the canonical flow CSV; the trailing `label` column is optional.
pub const CANONICAL_COLUMNS: [&str; 9] = [
    "src_ip",
    "src_port",
    "dst_ip",
    "dst_port",
    "packets_total",
    "bytes_total",
    "rel_start_s",
    "duration_s",
    "label",
];

/// Parses the canonical flow CSV.
///
/// `seq_no` follows row order. An empty `packets_total` cell means "not
/// reported". A label cell that is empty or not `0`/`1` leaves that flow
/// unlabeled, which makes the whole dataset unlabeled.
pub fn parse_flow_csv<R: Read>(input: R) -> Result<FlowDataset> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(input);
    let mut records = reader.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => return Err(Error::Format("missing canonical flow CSV header".into())),
    };
    let columns = header_columns(&header)?;
    let has_label = columns == CANONICAL_COLUMNS.len();

    let mut flows = Vec::new();
    for (seq_no, rec) in records.enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != columns {
            return Err(Error::parse(
                line,
                format!("expected {columns} columns, found {}", rec.len()),
            ));
        }
        flows.push(parse_row(&rec, line, seq_no as u64, has_label)?);
    }
    Ok(FlowDataset::with_label_column("csv", flows, has_label))
}

fn header_columns(header: &StringRecord) -> Result<usize> {
    let fields: Vec<&str> = header.iter().map(|f| f.trim_start_matches('\u{feff}')).collect();
    let required = &CANONICAL_COLUMNS[..CANONICAL_COLUMNS.len() - 1];
    if fields == required || fields == CANONICAL_COLUMNS {
        Ok(fields.len())
    } else {
        Err(Error::Format(format!(
            "expected header '{}', found '{}'",
            CANONICAL_COLUMNS.join(","),
            fields.join(",")
        )))
    }
}

fn parse_row(rec: &StringRecord, line: u64, seq_no: u64, has_label: bool) -> Result<FlowRecord> {
    let packets_total = match &rec[4] {
        "" => None,
        cell => Some(parse_count(cell, "packets_total", line)?),
    };
    let bytes_total = parse_count(&rec[5], "bytes_total", line)?;
    if packets_total.is_some_and(|p| p >= 1) && bytes_total == 0 {
        return Err(Error::parse(line, "packets_total >= 1 but bytes_total is 0"));
    }
    let label = if has_label {
        match &rec[8] {
            "0" => Some(false),
            "1" => Some(true),
            _ => None,
        }
    } else {
        None
    };
    Ok(FlowRecord {
        src_ip: parse_field::<IpAddr>(&rec[0], "src_ip", line)?,
        src_port: parse_field::<u16>(&rec[1], "src_port", line)?,
        dst_ip: parse_field::<IpAddr>(&rec[2], "dst_ip", line)?,
        dst_port: parse_field::<u16>(&rec[3], "dst_port", line)?,
        packets_total,
        bytes_total,
        rel_start: parse_seconds(&rec[6], "rel_start_s", line)?,
        duration: parse_seconds(&rec[7], "duration_s", line)?,
        label,
        seq_no,
    })
}

fn parse_field<T: FromStr>(cell: &str, name: &str, line: u64) -> Result<T> {
    cell.parse()
        .map_err(|_| Error::parse(line, format!("invalid {name} '{cell}'")))
}

pub(crate) fn parse_count(cell: &str, name: &str, line: u64) -> Result<u64> {
    if cell.starts_with('-') {
        return Err(Error::parse(line, format!("negative {name} '{cell}'")));
    }
    parse_field(cell, name, line)
}

fn parse_seconds(cell: &str, name: &str, line: u64) -> Result<f64> {
    let value: f64 = parse_field(cell, name, line)?;
    if !value.is_finite() || value < 0.0 {
        return Err(Error::parse(line, format!("{name} must be a finite non-negative number, found '{cell}'")));
    }
    Ok(value)
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::Utf8 { err, .. } => Error::parse(line, format!("invalid UTF-8: {err}")),
        other => Error::parse(line, format!("{other:?}")),
    }
}

/// Writes the canonical flow CSV. The label column is emitted when any flow
/// carries a label; missing labels and packet counts become empty cells.
pub fn write_flow_csv<W: Write>(dataset: &FlowDataset, mut out: W) -> Result<()> {
    let with_label = dataset.flows().iter().any(|f| f.label.is_some());
    let columns = if with_label {
        &CANONICAL_COLUMNS[..]
    } else {
        &CANONICAL_COLUMNS[..CANONICAL_COLUMNS.len() - 1]
    };
    writeln!(out, "{}", columns.join(","))?;
    for f in dataset.flows() {
        write!(
            out,
            "{},{},{},{},",
            f.src_ip, f.src_port, f.dst_ip, f.dst_port
        )?;
        if let Some(p) = f.packets_total {
            write!(out, "{p}")?;
        }
        write!(out, ",{},{},{}", f.bytes_total, f.rel_start, f.duration)?;
        if with_label {
            match f.label {
                Some(true) => write!(out, ",1")?,
                Some(false) => write!(out, ",0")?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
