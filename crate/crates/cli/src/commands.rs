use std::fs;

use benflow_core::detector::{write_window_scores, DetectorConfig, Labeling};
use benflow_core::evaluation::{
    grid_evaluate, standard_labeling_grid, write_grid_csv, write_roc_csv, write_sweep_csv, WINDOW_GRID,
};
use benflow_core::flow::write_flow_csv;
use benflow_core::prelude::*;
use benflow_core::synth::{describe, SizeModel};
use serde_json::json;

use crate::args::{
    parse_burst, parse_decades, parse_labelings, parse_metrics, parse_sizes, EvaluateArgs, GenerateArgs, IngestArgs,
    InputArgs, InputFormat, OutputArgs, ScoreArgs, SweepArgs,
};
use crate::manifest::{emit, FileRef};
use crate::CliError;

/// Human-readable report lines: stdout when data goes to a file, else stderr.
fn report(output: &OutputArgs, line: &str) {
    if output.output.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn load(input: &InputArgs) -> Result<(FlowDataset, FileRef), CliError> {
    let bytes = fs::read(&input.input).map_err(|e| CliError::io(&input.input, e))?;
    let mut dataset = match input.format {
        InputFormat::Csv => parse_flow_csv(bytes.as_slice()),
        InputFormat::Tshark => parse_tshark_conversations(bytes.as_slice()),
        InputFormat::Kdd => adapt_kdd(bytes.as_slice()),
    }?;
    dataset.set_source_name(input.input.display().to_string());
    log::info!("{}: {} flows", input.input.display(), dataset.len());
    Ok((dataset, FileRef::new(&input.input, &bytes)))
}

pub fn score(args: &ScoreArgs) -> Result<(), CliError> {
    let config = args.detector.config(args.labeling())?;
    let (dataset, input) = load(&args.input)?;
    let scores = run_detector(&dataset, &config)?;
    let mut buf = Vec::new();
    write_window_scores(&scores, &mut buf)?;
    emit(args.output.output.as_deref(), &buf, "score", Some(input), json!({ "detector": config }))?;

    let alerts = scores.iter().filter(|s| s.decision).count();
    report(&args.output, &format!("{} windows, {alerts} alerts at T={}", scores.len(), config.threshold_t));
    match divergence_stats(&scores) {
        Ok(s) => report(
            &args.output,
            &format!(
                "{}: average {:.6} median {:.6} min {:.6} max {:.6} ({} invalid)",
                config.metric, s.average, s.median, s.minimum, s.maximum, s.invalid
            ),
        ),
        Err(e) => report(&args.output, &format!("no statistics: {e}")),
    }
    Ok(())
}

fn require_both_classes(dataset: &FlowDataset) -> Result<(), CliError> {
    if !dataset.is_labeled() {
        return Err(benflow_core::Error::Unlabeled.into());
    }
    let malicious = dataset.malicious_count();
    if malicious == 0 || malicious == dataset.len() {
        return Err(benflow_core::Error::DegenerateLabels.into());
    }
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let labelings = parse_labelings(args.tl.as_deref(), args.labeling_abs.as_deref())?;
    if args.roc {
        let labeling = match labelings.as_slice() {
            [] => DetectorConfig::default().labeling,
            [one] => *one,
            _ => return Err(CliError::Usage("--roc takes a single labeling threshold".into())),
        };
        let config = args.detector.config(labeling)?;
        let (dataset, input) = load(&args.input)?;
        require_both_classes(&dataset)?;
        let scores = run_detector(&dataset, &config)?;
        let pairs: Vec<(f64, bool)> = scores.iter().map(|s| (s.score, s.truth.unwrap_or(false))).collect();
        let curve = roc_auc(&pairs)?;
        let mut buf = Vec::new();
        write_roc_csv(&curve, &mut buf)?;
        emit(args.output.output.as_deref(), &buf, "evaluate", Some(input), json!({ "detector": config, "roc": true }))?;
        report(
            &args.output,
            &format!("AUC {:.6} at W={} {} {}", curve.auc, config.window.size(), labeling, config.metric),
        );
        return Ok(());
    }

    let windows = match &args.windows {
        Some(s) => parse_sizes(s)?,
        None => WINDOW_GRID.to_vec(),
    };
    let metrics = match &args.metrics {
        Some(s) => parse_metrics(s)?,
        None => SimilarityMetric::ALL.to_vec(),
    };
    let labelings = if labelings.is_empty() { standard_labeling_grid() } else { labelings };
    let base = args.detector.config(Labeling::Relative(1.0))?;
    let (dataset, input) = load(&args.input)?;
    require_both_classes(&dataset)?;
    let grid = grid_evaluate(&dataset, &base, &windows, &labelings, &metrics)?;
    let mut buf = Vec::new();
    write_grid_csv(&grid, &mut buf)?;
    let config = json!({
        "detector": base,
        "windows": windows,
        "labelings": labelings.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "metrics": metrics,
    });
    emit(args.output.output.as_deref(), &buf, "evaluate", Some(input), config)?;
    let evaluated = grid.cells.iter().filter(|c| c.auc.is_some()).count();
    report(&args.output, &format!("{evaluated} of {} cells evaluated", grid.cells.len()));
    match grid.best() {
        Some(best) => report(
            &args.output,
            &format!("best AUC {:.6} at W={} {} {}", best.auc.unwrap_or(f64::NAN), best.w, best.labeling, best.metric),
        ),
        None => report(&args.output, "no cell could be evaluated"),
    }
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let windows = parse_sizes(&args.windows)?;
    let config = args.detector.config(Labeling::Relative(1.0))?;
    let (dataset, input) = load(&args.input)?;
    let cells = window_size_sweep(&dataset, &config, &windows)?;
    let mut buf = Vec::new();
    write_sweep_csv(&cells, &mut buf)?;
    emit(
        args.output.output.as_deref(),
        &buf,
        "sweep",
        Some(input),
        json!({ "detector": config, "windows": windows }),
    )?;
    let absent = cells.iter().filter(|c| c.mean_score.is_none()).count();
    report(&args.output, &format!("{} window sizes, {absent} without valid windows", cells.len()));
    Ok(())
}

pub fn generate(args: &GenerateArgs) -> Result<(), CliError> {
    let mut spec = GeneratorSpec::new(args.seed, args.normal, parse_decades(&args.decades)?);
    for b in &args.burst {
        spec = spec.with_burst(parse_burst(b)?);
    }
    if let Some(shape) = args.pareto {
        spec.size_model = SizeModel::Pareto { shape };
    }
    let dataset = benflow_core::synth::generate(&spec)?;
    let mut buf = Vec::new();
    write_flow_csv(&dataset, &mut buf)?;
    emit(args.output.output.as_deref(), &buf, "generate", None, json!({ "generator": spec }))?;
    report(&args.output, &describe(&spec));
    Ok(())
}

pub fn ingest(args: &IngestArgs) -> Result<(), CliError> {
    let (dataset, input) = load(&args.input)?;
    let mut buf = Vec::new();
    write_flow_csv(&dataset, &mut buf)?;
    emit(args.output.output.as_deref(), &buf, "ingest", Some(input), json!({ "format": format!("{:?}", args.input.format).to_lowercase() }))?;
    report(
        &args.output,
        &format!("{} flows, {}", dataset.len(), if dataset.is_labeled() { "labeled" } else { "unlabeled" }),
    );
    Ok(())
}
