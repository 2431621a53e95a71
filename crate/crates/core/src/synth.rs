//! Seeded synthetic flow datasets: log-uniform normal traffic with labeled
//! attack bursts spliced in.
//!
//! Randomness comes from ChaCha8 seeded through `SeedableRng::seed_from_u64`.
//! Uniform reals are `(next_u64 >> 11) * 2^-53`, so a dataset is a pure
//! function of its spec on every platform.

use std::fmt::Write as _;
use std::net::{IpAddr, Ipv4Addr};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::flow::{FlowDataset, FlowRecord};
use crate::{Error, Result};

/// Nominal packet size used to derive packet counts from byte counts.
pub const NOMINAL_PACKET_BYTES: u64 = 500;

const MIN_DECADES: i32 = 4;
const MAX_EXPONENT: i32 = 19;
const SERVICE_PORTS: [u16; 6] = [80, 443, 22, 25, 53, 8080];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BurstPattern {
    /// Every flow carries exactly `v` bytes.
    ConstantSize(u64),
    /// Sizes uniform on `lo..=hi` bytes.
    UniformSize(u64, u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackBurst {
    /// Output position of the first attack flow.
    pub start_index: usize,
    pub length: usize,
    pub pattern: BurstPattern,
}

impl AttackBurst {
    fn end(&self) -> usize {
        self.start_index + self.length
    }
}

/// Distribution of normal flow sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SizeModel {
    /// `floor(10^u)` with `u` uniform over the decade range.
    LogUniform,
    /// Pareto with scale `10^lo` and the given shape; not truncated.
    Pareto { shape: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub n_normal: usize,
    /// Normal sizes lie in `[10^lo, 10^hi)`.
    pub size_decades: (i32, i32),
    pub attacks: Vec<AttackBurst>,
    pub size_model: SizeModel,
}

impl GeneratorSpec {
    /// Log-uniform normal traffic without attacks.
    pub fn new(seed: u64, n_normal: usize, size_decades: (i32, i32)) -> Self {
        GeneratorSpec {
            seed,
            n_normal,
            size_decades,
            attacks: Vec::new(),
            size_model: SizeModel::LogUniform,
        }
    }

    pub fn with_burst(mut self, burst: AttackBurst) -> Self {
        self.attacks.push(burst);
        self
    }

    pub fn total_flows(&self) -> usize {
        self.n_normal + self.malicious_flows()
    }

    pub fn malicious_flows(&self) -> usize {
        self.attacks.iter().map(|b| b.length).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n_normal == 0 {
            return bad("n_normal must be positive".into());
        }
        let (lo, hi) = self.size_decades;
        if lo < 0 || hi > MAX_EXPONENT {
            return bad(format!("size decades must lie within 0..={MAX_EXPONENT}, got {lo}:{hi}"));
        }
        if hi - lo < MIN_DECADES {
            return bad(format!("size decades must span at least {MIN_DECADES}, got {lo}:{hi}"));
        }
        if let SizeModel::Pareto { shape } = self.size_model {
            if !(shape.is_finite() && shape > 0.0) {
                return bad(format!("Pareto shape must be positive, got {shape}"));
            }
        }
        let total = self.total_flows();
        for b in &self.attacks {
            if b.length == 0 {
                return bad(format!("burst at {} has zero length", b.start_index));
            }
            match b.pattern {
                BurstPattern::ConstantSize(0) => return bad("constant burst size must be at least 1".into()),
                BurstPattern::UniformSize(lo, hi) if lo == 0 || lo > hi => {
                    return bad(format!("uniform burst range {lo}..={hi} is invalid"))
                }
                _ => {}
            }
            if b.end() > total {
                return bad(format!("burst {}..{} exceeds {total} output flows", b.start_index, b.end()));
            }
        }
        let mut sorted: Vec<&AttackBurst> = self.attacks.iter().collect();
        sorted.sort_by_key(|b| b.start_index);
        for pair in sorted.windows(2) {
            if pair[0].end() > pair[1].start_index {
                return bad(format!(
                    "bursts {}..{} and {}..{} overlap",
                    pair[0].start_index,
                    pair[0].end(),
                    pair[1].start_index,
                    pair[1].end()
                ));
            }
        }
        Ok(())
    }
}

struct Source(ChaCha8Rng);

impl Source {
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `lo..=hi`.
    fn range(&mut self, lo: u64, hi: u64) -> u64 {
        let span = (hi - lo) as f64 + 1.0;
        (lo + (self.unit() * span) as u64).min(hi)
    }
}

fn packets_for(bytes: u64) -> u64 {
    (bytes / NOMINAL_PACKET_BYTES).max(1)
}

/// Generates the labeled dataset described by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<FlowDataset> {
    spec.validate()?;
    let mut rng = Source(ChaCha8Rng::seed_from_u64(spec.seed));
    let (lo, hi) = (spec.size_decades.0 as f64, spec.size_decades.1 as f64);

    let clients: Vec<IpAddr> = (0..256)
        .map(|_| {
            let x = rng.0.next_u32();
            IpAddr::V4(Ipv4Addr::new(10, (x >> 16) as u8, (x >> 8) as u8, x as u8))
        })
        .collect();
    let servers: Vec<IpAddr> = (0..64)
        .map(|_| {
            let x = rng.0.next_u32();
            IpAddr::V4(Ipv4Addr::new(192, 168, (x >> 8) as u8, x as u8))
        })
        .collect();
    let attacker = IpAddr::V4(Ipv4Addr::new(172, 16, 0, 66));

    let mut bursts = spec.attacks.clone();
    bursts.sort_by_key(|b| b.start_index);
    let mut bursts = bursts.into_iter().peekable();

    let total = spec.total_flows();
    let mut flows = Vec::with_capacity(total);
    let mut clock = 0.0f64;
    let mut i = 0;
    while i < total {
        if let Some(b) = bursts.next_if(|b| b.start_index == i) {
            let victim = servers[rng.range(0, servers.len() as u64 - 1) as usize];
            for _ in 0..b.length {
                let bytes = match b.pattern {
                    BurstPattern::ConstantSize(v) => v,
                    BurstPattern::UniformSize(lo, hi) => rng.range(lo, hi),
                };
                clock += 1e-4 + rng.unit() * 1e-3;
                flows.push(FlowRecord {
                    src_ip: attacker,
                    src_port: rng.range(1024, 65535) as u16,
                    dst_ip: victim,
                    dst_port: 80,
                    packets_total: Some(packets_for(bytes)),
                    bytes_total: bytes,
                    rel_start: clock,
                    duration: rng.unit() * 0.1,
                    label: Some(true),
                    seq_no: i as u64,
                });
                i += 1;
            }
            continue;
        }
        let bytes = match spec.size_model {
            SizeModel::LogUniform => 10f64.powf(lo + (hi - lo) * rng.unit()).floor() as u64,
            SizeModel::Pareto { shape } => (10f64.powf(lo) * (1.0 - rng.unit()).powf(-1.0 / shape)).floor() as u64,
        };
        clock += 1e-4 + rng.unit() * 1e-2;
        flows.push(FlowRecord {
            src_ip: clients[rng.range(0, clients.len() as u64 - 1) as usize],
            src_port: rng.range(1024, 65535) as u16,
            dst_ip: servers[rng.range(0, servers.len() as u64 - 1) as usize],
            dst_port: SERVICE_PORTS[rng.range(0, SERVICE_PORTS.len() as u64 - 1) as usize],
            packets_total: Some(packets_for(bytes)),
            bytes_total: bytes,
            rel_start: clock,
            duration: rng.unit() * 5.0,
            label: Some(false),
            seq_no: i as u64,
        });
        i += 1;
    }
    Ok(FlowDataset::new(format!("synth:seed={}", spec.seed), flows))
}

/// Human-readable summary of the flows `spec` produces.
pub fn describe(spec: &GeneratorSpec) -> String {
    let mut out = String::new();
    let (lo, hi) = spec.size_decades;
    let model = match spec.size_model {
        SizeModel::LogUniform => "log-uniform".to_string(),
        SizeModel::Pareto { shape } => format!("pareto(shape={shape})"),
    };
    let _ = writeln!(out, "seed {}", spec.seed);
    let _ = writeln!(out, "{} normal flows, {model} sizes in [1e{lo}, 1e{hi})", spec.n_normal);
    let mut bursts = spec.attacks.clone();
    bursts.sort_by_key(|b| b.start_index);
    for b in &bursts {
        let pattern = match b.pattern {
            BurstPattern::ConstantSize(v) => format!("constant {v} bytes"),
            BurstPattern::UniformSize(lo, hi) => format!("uniform {lo}..={hi} bytes"),
        };
        let _ = writeln!(out, "burst at {}..{}: {} flows, {pattern}", b.start_index, b.end(), b.length);
    }
    let _ = writeln!(out, "{} malicious flows", spec.malicious_flows());
    let _ = write!(out, "{} flows total", spec.total_flows());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn burst(start: usize, length: usize) -> AttackBurst {
        AttackBurst {
            start_index: start,
            length,
            pattern: BurstPattern::ConstantSize(1500),
        }
    }

    #[test]
    fn deterministic() {
        let spec = GeneratorSpec::new(9, 2000, (1, 7)).with_burst(burst(500, 100));
        assert_eq!(generate(&spec).unwrap().flows(), generate(&spec).unwrap().flows());
        let other = GeneratorSpec { seed: 10, ..spec.clone() };
        assert_ne!(generate(&spec).unwrap().flows(), generate(&other).unwrap().flows());
    }

    #[test]
    fn bursts_are_spliced_and_labeled() {
        let spec = GeneratorSpec::new(1, 1000, (1, 7)).with_burst(burst(0, 10)).with_burst(burst(600, 50));
        let ds = generate(&spec).unwrap();
        assert_eq!(ds.len(), 1060);
        assert!(ds.is_labeled());
        assert_eq!(ds.malicious_count(), 60);
        for (i, f) in ds.flows().iter().enumerate() {
            let attack = i < 10 || (600..650).contains(&i);
            assert_eq!(f.label, Some(attack), "flow {i}");
            if attack {
                assert_eq!(f.bytes_total, 1500);
            }
            assert_eq!(f.seq_no, i as u64);
        }
        assert!(ds.flows().windows(2).all(|p| p[0].rel_start < p[1].rel_start));
    }

    #[test]
    fn normal_sizes_within_decades() {
        let ds = generate(&GeneratorSpec::new(3, 5000, (2, 6))).unwrap();
        for f in ds.flows() {
            assert!((100..1_000_000).contains(&f.bytes_total));
            assert_eq!(f.packets_total, Some((f.bytes_total / 500).max(1)));
        }
    }

    #[test]
    fn uniform_burst_range() {
        let spec = GeneratorSpec::new(4, 100, (1, 7)).with_burst(AttackBurst {
            start_index: 100,
            length: 500,
            pattern: BurstPattern::UniformSize(60, 64),
        });
        let ds = generate(&spec).unwrap();
        assert!(ds.flows()[100..].iter().all(|f| (60..=64).contains(&f.bytes_total)));
    }

    #[test]
    fn invalid_specs() {
        let base = GeneratorSpec::new(1, 100, (1, 7));
        assert!(base.clone().with_burst(burst(10, 20)).with_burst(burst(25, 5)).validate().is_err());
        assert!(base.clone().with_burst(burst(95, 10)).validate().is_ok());
        assert!(base.clone().with_burst(burst(101, 10)).validate().is_err());
        assert!(base.clone().with_burst(burst(10, 0)).validate().is_err());
        assert!(GeneratorSpec::new(1, 100, (1, 4)).validate().is_err());
        assert!(GeneratorSpec::new(1, 0, (1, 7)).validate().is_err());
        let err = generate(&base.with_burst(burst(0, 5)).with_burst(burst(4, 5))).unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn describe_counts() {
        assert!(describe(&GeneratorSpec::new(1, 100, (1, 7))).contains("0 malicious flows"));
        let spec = GeneratorSpec::new(1, 1000, (1, 7)).with_burst(burst(0, 100)).with_burst(burst(500, 100));
        let text = describe(&spec);
        assert!(text.contains("200 malicious flows"));
        assert!(text.contains("1200 flows total"));
        assert_eq!(generate(&spec).unwrap().malicious_count(), 200);
    }
}
