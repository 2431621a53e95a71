use std::path::PathBuf;

use benflow_core::detector::{DetectorConfig, Labeling};
use benflow_core::evaluation::{ABSOLUTE_LABELING_GRID, RELATIVE_LABELING_GRID};
use benflow_core::prelude::*;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "benflow", version, about = "Benford's-law anomaly detection over TCP flow records")]
pub struct Cli {
    /// Worker threads for window scoring and grid cells (0 = all cores).
    #[arg(long, global = true, env = "BENFLOW_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every window of a flow file.
    Score(ScoreArgs),
    /// ROC curve or AUC grid over window sizes, labelings and metrics.
    Evaluate(EvaluateArgs),
    /// Mean anomaly score per window size.
    Sweep(SweepArgs),
    /// Write a seeded synthetic dataset as canonical CSV.
    Generate(GenerateArgs),
    /// Convert any supported input to canonical CSV.
    Ingest(IngestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Csv,
    Tshark,
    Kdd,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input file.
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = InputFormat::Csv)]
    pub format: InputFormat,
}

/// Knobs shared by every command that scores windows.
#[derive(Debug, Args)]
pub struct DetectorArgs {
    #[arg(long, default_value = "chi2")]
    pub metric: String,

    /// Window size W in flows.
    #[arg(long, default_value_t = 2500)]
    pub window: usize,

    /// Slide step S in flows [default: W/2].
    #[arg(long)]
    pub step: Option<usize>,

    /// Decision threshold T on the anomaly score.
    #[arg(long, default_value_t = 0.4)]
    pub threshold: f64,

    #[arg(long, default_value = "bytes")]
    pub unit: String,

    /// skip | count
    #[arg(long, default_value = "count")]
    pub zero_policy: String,

    /// start-end | end-start | src-dst-start | five-tuple-start
    #[arg(long, default_value = "start-end")]
    pub ordering: String,

    /// Digit-0 weight of the modified KLD.
    #[arg(long)]
    pub theta: Option<f64>,
}

impl DetectorArgs {
    pub fn config(&self, labeling: Labeling) -> Result<DetectorConfig, CliError> {
        let window = match self.step {
            Some(s) => WindowSpec::new(self.window, s)?,
            None => WindowSpec::half_step(self.window)?,
        };
        let config = DetectorConfig {
            window,
            unit: self.unit.parse().map_err(CliError::Usage)?,
            zero_policy: self.zero_policy.parse().map_err(CliError::Usage)?,
            ordering: self.ordering.parse().map_err(CliError::Usage)?,
            metric: self.metric.parse().map_err(CliError::Usage)?,
            kld: match self.theta {
                Some(t) => KldParams::new(t)?,
                None => KldParams::default(),
            },
            threshold_t: self.threshold,
            labeling,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file [default: standard output, without manifest].
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,

    /// Relative labeling threshold t_l.
    #[arg(long, conflicts_with = "labeling_abs")]
    pub tl: Option<f64>,

    /// Absolute labeling threshold T_l.
    #[arg(long)]
    pub labeling_abs: Option<u32>,

    #[command(flatten)]
    pub output: OutputArgs,
}

impl ScoreArgs {
    pub fn labeling(&self) -> Labeling {
        match (self.tl, self.labeling_abs) {
            (_, Some(t)) => Labeling::Absolute(t),
            (Some(t), None) => Labeling::Relative(t),
            (None, None) => DetectorConfig::default().labeling,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,

    /// Comma-separated metrics for the grid [default: all].
    #[arg(long)]
    pub metrics: Option<String>,

    /// Grid window sizes: a list or `lo..hi:step` [default: 100,200,500,1000,2500,5000].
    #[arg(long)]
    pub windows: Option<String>,

    /// Relative labelings: a list, or `lo..hi` to pick from the standard grid.
    #[arg(long)]
    pub tl: Option<String>,

    /// Absolute labelings: a list, or `lo..hi` to pick from the standard grid.
    #[arg(long)]
    pub labeling_abs: Option<String>,

    /// Single ROC curve at --window and one labeling instead of a grid.
    #[arg(long)]
    pub roc: bool,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,

    /// Window sizes: a list or `lo..hi:step`.
    #[arg(long, default_value = "500..20000:250")]
    pub windows: String,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Number of normal flows.
    #[arg(long, default_value_t = 50_000)]
    pub normal: usize,

    /// Size exponents `lo:hi`; normal sizes lie in [10^lo, 10^hi).
    #[arg(long, default_value = "1:7")]
    pub decades: String,

    /// `const:SIZE:START:LEN` or `uniform:LO:HI:START:LEN`; repeatable.
    #[arg(long)]
    pub burst: Vec<String>,

    /// Draw normal sizes from a Pareto law with this shape instead.
    #[arg(long)]
    pub pareto: Option<f64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("invalid {what} '{s}'")))
}

/// `a,b,c` or `lo..hi:step` (inclusive).
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, CliError> {
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = rest
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("window range '{s}' needs a step, e.g. 500..5000:250")))?;
        let (lo, hi, step): (usize, usize, usize) = (number(lo, "size")?, number(hi, "size")?, number(step, "step")?);
        if step == 0 || lo > hi {
            return Err(CliError::Usage(format!("empty window range '{s}'")));
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',').map(|v| number(v, "size")).collect()
}

/// `a,b,c` or `lo..hi`, the latter selecting standard grid values in range.
fn parse_grid<T>(s: &str, standard: &[T], what: &str) -> Result<Vec<T>, CliError>
where
    T: std::str::FromStr + PartialOrd + Copy,
{
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi): (T, T) = (number(lo, what)?, number(hi, what)?);
        let picked: Vec<T> = standard.iter().copied().filter(|v| *v >= lo && *v <= hi).collect();
        if picked.is_empty() {
            return Err(CliError::Usage(format!("no standard {what} in '{s}'")));
        }
        return Ok(picked);
    }
    s.split(',').map(|v| number(v, what)).collect()
}

pub fn parse_labelings(tl: Option<&str>, abs: Option<&str>) -> Result<Vec<Labeling>, CliError> {
    let mut out = Vec::new();
    if let Some(s) = tl {
        out.extend(parse_grid(s, &RELATIVE_LABELING_GRID, "relative threshold")?.into_iter().map(Labeling::Relative));
    }
    if let Some(s) = abs {
        out.extend(parse_grid(s, &ABSOLUTE_LABELING_GRID, "absolute threshold")?.into_iter().map(Labeling::Absolute));
    }
    Ok(out)
}

pub fn parse_metrics(s: &str) -> Result<Vec<SimilarityMetric>, CliError> {
    s.split(',').map(|m| m.trim().parse().map_err(CliError::Usage)).collect()
}

pub fn parse_decades(s: &str) -> Result<(i32, i32), CliError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("decades '{s}' must look like lo:hi")))?;
    Ok((number(lo, "exponent")?, number(hi, "exponent")?))
}

pub fn parse_burst(s: &str) -> Result<AttackBurst, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Usage(format!("invalid burst '{s}' (const:SIZE:START:LEN or uniform:LO:HI:START:LEN)"));
    let (pattern, start, len) = match parts.as_slice() {
        ["const", v, start, len] => (BurstPattern::ConstantSize(number(v, "size")?), start, len),
        ["uniform", lo, hi, start, len] => (BurstPattern::UniformSize(number(lo, "size")?, number(hi, "size")?), start, len),
        _ => return Err(bad()),
    };
    Ok(AttackBurst {
        start_index: number(start, "burst start")?,
        length: number(len, "burst length")?,
        pattern,
    })
}
