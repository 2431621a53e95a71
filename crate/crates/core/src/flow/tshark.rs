//! Reader for the "TCP Conversations" table of `tshark -q -z conv,tcp`.
//!
//! ```text
//! ================================================================================
//! TCP Conversations
//! Filter:<No Filter>
//!                                                |       <-      | |       ->      | |     Total     |    Relative    |   Duration   |
//!                                                | Frames  Bytes | | Frames  Bytes | | Frames  Bytes |      Start     |              |
//! 10.0.0.5:51234 <-> 93.184.216.34:443              40 52000        40 4100          80 56100       12.345   3.210
//! ================================================================================
//! ```
//!
//! Newer tshark releases print byte columns with a unit ("6,342 bytes",
//! "56 kB"); both styles are accepted.

use std::io::{BufRead, BufReader, Read};
use std::net::IpAddr;

use super::{FlowDataset, FlowRecord};
use crate::{Error, Result};

const TITLE: &str = "TCP Conversations";

pub fn parse_tshark_conversations<R: Read>(input: R) -> Result<FlowDataset> {
    let reader = BufReader::new(input);
    let mut seen_title = false;
    let mut flows = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx as u64 + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.chars().all(|c| c == '=') {
            continue;
        }
        if trimmed == TITLE {
            seen_title = true;
            continue;
        }
        if !seen_title {
            return Err(Error::Format(format!(
                "line {lineno}: expected '{TITLE}' table title, found '{trimmed}'"
            )));
        }
        if trimmed.starts_with("Filter:") || trimmed.contains('|') {
            continue;
        }
        if !trimmed.contains("<->") {
            return Err(Error::Format(format!("line {lineno}: not a conversation row: '{trimmed}'")));
        }
        let seq_no = flows.len() as u64;
        flows.push(parse_conversation(trimmed, lineno, seq_no)?);
    }

    if !seen_title {
        return Err(Error::Format(format!("no '{TITLE}' table found")));
    }
    Ok(FlowDataset::with_label_column("tshark", flows, false))
}

fn parse_conversation(line: &str, lineno: u64, seq_no: u64) -> Result<FlowRecord> {
    let (left, right) = line.split_once("<->").expect("caller checked for <->");
    let (src_ip, src_port) = parse_endpoint(left.trim(), lineno)?;
    let tokens: Vec<&str> = right.split_whitespace().collect();
    let mut cursor = Cursor { tokens: &tokens, pos: 0, lineno };
    let (dst_ip, dst_port) = parse_endpoint(cursor.take("destination endpoint")?, lineno)?;

    // (frames, bytes) for B->A, A->B and the totals; only the totals are kept.
    let mut frames = 0;
    let mut bytes = 0;
    for _ in 0..3 {
        frames = parse_plain_count(cursor.take("frames")?, lineno)?;
        let number = cursor.take("bytes")?;
        let unit = cursor.take_if(|tok| !starts_numeric(tok));
        bytes = parse_byte_quantity(number, unit, lineno)?;
    }
    let rel_start = parse_seconds(cursor.take("relative start")?, lineno)?;
    let duration = parse_seconds(cursor.take("duration")?, lineno)?;
    if let Some(extra) = cursor.take_if(|_| true) {
        return Err(Error::parse(lineno, format!("unexpected trailing token '{extra}'")));
    }

    Ok(FlowRecord {
        src_ip,
        src_port,
        dst_ip,
        dst_port,
        packets_total: Some(frames),
        bytes_total: bytes,
        rel_start,
        duration,
        label: None,
        seq_no,
    })
}

struct Cursor<'a> {
    tokens: &'a [&'a str],
    pos: usize,
    lineno: u64,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, what: &str) -> Result<&'a str> {
        let tok = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| Error::parse(self.lineno, format!("missing {what} column")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn take_if(&mut self, pred: impl Fn(&str) -> bool) -> Option<&'a str> {
        let tok = *self.tokens.get(self.pos)?;
        if pred(tok) {
            self.pos += 1;
            Some(tok)
        } else {
            None
        }
    }
}

fn starts_numeric(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_ascii_digit())
}

fn parse_endpoint(text: &str, lineno: u64) -> Result<(IpAddr, u16)> {
    let (addr, port) = text
        .rsplit_once(':')
        .ok_or_else(|| Error::parse(lineno, format!("endpoint '{text}' lacks a port")))?;
    let addr = addr.trim_start_matches('[').trim_end_matches(']');
    let ip = addr
        .parse()
        .map_err(|_| Error::parse(lineno, format!("invalid address '{addr}'")))?;
    let port = match port.parse::<u16>() {
        Ok(p) => p,
        Err(_) => service_port(port)
            .ok_or_else(|| Error::parse(lineno, format!("unknown port or service name '{port}'")))?,
    };
    Ok((ip, port))
}

/// tshark resolves well-known ports to service names unless run with `-n`.
fn service_port(name: &str) -> Option<u16> {
    let port = match name {
        "ftp-data" => 20,
        "ftp" => 21,
        "ssh" => 22,
        "telnet" => 23,
        "smtp" => 25,
        "domain" => 53,
        "http" => 80,
        "kerberos" => 88,
        "pop3" => 110,
        "sunrpc" => 111,
        "ident" | "auth" => 113,
        "nntp" => 119,
        "epmap" => 135,
        "netbios-ssn" => 139,
        "imap" => 143,
        "bgp" => 179,
        "ldap" => 389,
        "https" => 443,
        "microsoft-ds" => 445,
        "submission" => 587,
        "ldaps" => 636,
        "imaps" => 993,
        "pop3s" => 995,
        "ms-sql-s" => 1433,
        "mysql" => 3306,
        "ms-wbt-server" => 3389,
        "postgresql" => 5432,
        "http-alt" => 8080,
        _ => return None,
    };
    Some(port)
}

fn parse_plain_count(token: &str, lineno: u64) -> Result<u64> {
    token
        .replace(',', "")
        .parse()
        .map_err(|_| Error::parse(lineno, format!("invalid frame count '{token}'")))
}

fn parse_byte_quantity(number: &str, unit: Option<&str>, lineno: u64) -> Result<u64> {
    let multiplier: u64 = match unit {
        None | Some("bytes") | Some("B") => 1,
        Some("kB") | Some("KB") => 1_000,
        Some("MB") => 1_000_000,
        Some("GB") => 1_000_000_000,
        Some(other) => return Err(Error::parse(lineno, format!("unrecognized byte unit '{other}'"))),
    };
    let digits = number.replace(',', "");
    if let Ok(n) = digits.parse::<u64>() {
        return n
            .checked_mul(multiplier)
            .ok_or_else(|| Error::parse(lineno, format!("byte count '{number}' overflows")));
    }
    match digits.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok((x * multiplier as f64).round() as u64),
        _ => Err(Error::parse(lineno, format!("invalid byte count '{number}'"))),
    }
}

fn parse_seconds(token: &str, lineno: u64) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
        _ => Err(Error::parse(lineno, format!("invalid time value '{token}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &str) -> String {
        format!(
            "================================================================================\n\
             TCP Conversations\n\
             Filter:<No Filter>\n\
             \x20                                        |       <-      | |       ->      | |     Total     |    Relative    |   Duration   |\n\
             \x20                                        | Frames  Bytes | | Frames  Bytes | | Frames  Bytes |      Start     |              |\n\
             {rows}\
             ================================================================================\n"
        )
    }

    #[test]
    fn maps_total_columns() {
        let text = table("10.0.0.5:51234 <-> 93.184.216.34:443   40 52000   40 4100   80 56100   12.345   3.210\n");
        let ds = parse_tshark_conversations(text.as_bytes()).unwrap();
        assert_eq!(ds.len(), 1);
        let f = &ds.flows()[0];
        assert_eq!(f.src_port, 51234);
        assert_eq!(f.dst_port, 443);
        assert_eq!(f.packets_total, Some(80));
        assert_eq!(f.bytes_total, 56100);
        assert_eq!(f.rel_start, 12.345);
        assert_eq!(f.duration, 3.210);
        assert_eq!(f.label, None);
        assert!(!ds.is_labeled());
    }

    #[test]
    fn si_suffixes_expand() {
        let text = table("10.0.0.5:51234 <-> 93.184.216.34:https   40 52 kB   40 4,100 bytes   80 56 kB   0.5   1\n");
        let ds = parse_tshark_conversations(text.as_bytes()).unwrap();
        let f = &ds.flows()[0];
        assert_eq!(f.bytes_total, 56_000);
        assert_eq!(f.dst_port, 443);
    }

    #[test]
    fn megabytes() {
        let text = table("10.0.0.5:1 <-> 10.0.0.6:2   1 1 MB   1 1 MB   2 2 MB   0   0\n");
        assert_eq!(parse_tshark_conversations(text.as_bytes()).unwrap().flows()[0].bytes_total, 2_000_000);
    }

    #[test]
    fn unknown_unit_names_token() {
        let text = table("10.0.0.5:1 <-> 10.0.0.6:2   1 1 MB   1 1 MB   2 2 XB   0   0\n");
        match parse_tshark_conversations(text.as_bytes()) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("XB"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rule_lines_contribute_nothing() {
        let ds = parse_tshark_conversations(table("").as_bytes()).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn missing_title_is_format_error() {
        let text = "10.0.0.5:1 <-> 10.0.0.6:2   1 1   1 1   2 2   0   0\n";
        assert!(matches!(parse_tshark_conversations(text.as_bytes()), Err(Error::Format(_))));
        assert!(matches!(parse_tshark_conversations("".as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn ipv6_endpoints() {
        let text = table("2001:db8::1:51234 <-> 2001:db8::2:80   1 60   1 60   2 120   0.1   0.2\n");
        let ds = parse_tshark_conversations(text.as_bytes()).unwrap();
        let f = &ds.flows()[0];
        assert_eq!(f.src_ip, "2001:db8::1".parse::<IpAddr>().unwrap());
        assert_eq!(f.src_port, 51234);
    }

    #[test]
    fn truncated_row() {
        let text = table("10.0.0.5:1 <-> 10.0.0.6:2   1 1   1 1   2 2   0\n");
        assert!(matches!(parse_tshark_conversations(text.as_bytes()), Err(Error::Parse { line: 6, .. })));
    }
}
