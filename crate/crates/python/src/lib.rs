//! Python bindings: `import benflow`.

use std::fs;

use benflow_core::detector::{DetectorConfig, Labeling, WindowScore};
use benflow_core::flow::write_flow_csv;
use benflow_core::prelude::*;
use benflow_core::synth;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(benflow, BenflowError, PyException);

fn to_py(err: Error) -> PyErr {
    if err.is_config() {
        PyValueError::new_err(err.to_string())
    } else {
        BenflowError::new_err(err.to_string())
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

/// Size of an attack burst: one constant or an inclusive `(lo, hi)` range.
#[derive(FromPyObject)]
enum BurstSize {
    Constant(u64),
    Range((u64, u64)),
}

/// A set of flow records, optionally labeled.
#[pyclass(name = "FlowDataset", module = "benflow")]
struct PyFlowDataset {
    inner: FlowDataset,
}

#[pymethods]
impl PyFlowDataset {
    /// Reads a file in `csv`, `tshark` or `kdd` format.
    #[staticmethod]
    #[pyo3(signature = (path, format = "csv"))]
    fn read(path: &str, format: &str) -> PyResult<Self> {
        let bytes = fs::read(path).map_err(|e| BenflowError::new_err(format!("{path}: {e}")))?;
        let mut inner = match format {
            "csv" => parse_flow_csv(bytes.as_slice()),
            "tshark" => parse_tshark_conversations(bytes.as_slice()),
            "kdd" => adapt_kdd(bytes.as_slice()),
            other => return Err(PyValueError::new_err(format!("unknown format '{other}'"))),
        }
        .map_err(to_py)?;
        inner.set_source_name(path);
        Ok(PyFlowDataset { inner })
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyFlowDataset {
            inner: parse_flow_csv(text.as_bytes()).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_tshark(text: &str) -> PyResult<Self> {
        Ok(PyFlowDataset {
            inner: parse_tshark_conversations(text.as_bytes()).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_kdd(text: &str) -> PyResult<Self> {
        Ok(PyFlowDataset {
            inner: adapt_kdd(text.as_bytes()).map_err(to_py)?,
        })
    }

    /// Seeded synthetic traffic. Each burst is `(start, length, size)` where
    /// `size` is an int or an inclusive `(lo, hi)` pair.
    #[staticmethod]
    #[pyo3(signature = (seed, n_normal, decades = (1, 7), bursts = Vec::new()))]
    fn generate(seed: u64, n_normal: usize, decades: (i32, i32), bursts: Vec<(usize, usize, BurstSize)>) -> PyResult<Self> {
        let mut spec = GeneratorSpec::new(seed, n_normal, decades);
        for (start_index, length, size) in bursts {
            let pattern = match size {
                BurstSize::Constant(v) => BurstPattern::ConstantSize(v),
                BurstSize::Range((lo, hi)) => BurstPattern::UniformSize(lo, hi),
            };
            spec = spec.with_burst(AttackBurst {
                start_index,
                length,
                pattern,
            });
        }
        Ok(PyFlowDataset {
            inner: synth::generate(&spec).map_err(to_py)?,
        })
    }

    /// Canonical CSV text.
    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        write_flow_csv(&self.inner, &mut buf).map_err(to_py)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "FlowDataset({} flows, {}, source={:?})",
            self.inner.len(),
            if self.inner.is_labeled() { "labeled" } else { "unlabeled" },
            self.inner.source_name()
        )
    }

    #[getter]
    fn is_labeled(&self) -> bool {
        self.inner.is_labeled()
    }

    #[getter]
    fn malicious_count(&self) -> usize {
        self.inner.malicious_count()
    }

    /// Per-flow labels, or None for unlabeled data.
    fn labels(&self) -> Option<Vec<bool>> {
        self.inner.labels().ok()
    }

    #[pyo3(signature = (unit = "bytes"))]
    fn sizes(&self, unit: &str) -> PyResult<Vec<u64>> {
        size_sequence(&self.inner, parse(unit)?).map_err(to_py)
    }

    /// Copy of the dataset in the given flow order.
    fn ordered(&self, ordering: &str) -> PyResult<Self> {
        Ok(PyFlowDataset {
            inner: order_flows(self.inner.clone(), parse(ordering)?),
        })
    }
}

#[pyfunction(name = "benford_reference")]
#[pyo3(signature = (extended = false))]
fn py_benford_reference(extended: bool) -> Vec<f64> {
    benflow_core::benford::benford_reference(extended).as_slice().to_vec()
}

#[pyfunction(name = "first_digit")]
fn py_first_digit(n: u64) -> u8 {
    benflow_core::benford::first_digit(n).value()
}

/// Digit frequencies: 9 entries when zeros are skipped, 10 when counted.
#[pyfunction(name = "digit_histogram")]
#[pyo3(signature = (values, zero_policy = "count"))]
fn py_digit_histogram(values: Vec<u64>, zero_policy: &str) -> PyResult<Vec<f64>> {
    let h = benflow_core::benford::digit_histogram(&values, parse(zero_policy)?).map_err(to_py)?;
    Ok(h.as_slice().to_vec())
}

/// Raw metric value of an observed distribution (9 or 10 entries) against
/// the Benford reference.
#[pyfunction]
#[pyo3(signature = (name, observed, theta = None))]
fn metric(name: &str, observed: Vec<f64>, theta: Option<f64>) -> PyResult<f64> {
    let m: SimilarityMetric = parse(name)?;
    let obs = DigitDistribution::from_slice(&observed).map_err(to_py)?;
    let kld = match theta {
        Some(t) => KldParams::new(t).map_err(to_py)?,
        None => KldParams::default(),
    };
    Ok(m.evaluate(&obs, &benflow_core::benford::benford_reference(false), kld))
}

#[pyfunction(name = "anomaly_score")]
fn py_anomaly_score(name: &str, raw: f64) -> PyResult<f64> {
    Ok(anomaly_score(parse(name)?, raw))
}

#[pyfunction(name = "difference_sequence")]
fn py_difference_sequence(sizes: Vec<u64>) -> Vec<u64> {
    difference_sequence(&sizes)
}

/// `(start, end)` flow ranges of the complete windows over `n_flows`.
#[pyfunction(name = "windows")]
#[pyo3(signature = (n_flows, w, s = None))]
fn py_windows(n_flows: usize, w: usize, s: Option<usize>) -> PyResult<Vec<(usize, usize)>> {
    let spec = match s {
        Some(s) => WindowSpec::new(w, s),
        None => WindowSpec::half_step(w),
    }
    .map_err(to_py)?;
    Ok(windows(n_flows, spec).into_iter().map(|x| (x.start, x.end)).collect())
}

#[pyfunction(name = "label_window")]
fn py_label_window(labels: Vec<bool>, start: usize, end: usize, t_l: u32) -> PyResult<bool> {
    if start > end || end > labels.len() {
        return Err(PyValueError::new_err(format!("window {start}..{end} exceeds {} labels", labels.len())));
    }
    Ok(label_window(&labels, WindowIndex { start, end }, t_l))
}

type RocPoints = Vec<(f64, f64, f64)>;

/// `(auc, [(threshold, fpr, tpr), ...])`.
#[pyfunction(name = "roc_auc")]
fn py_roc_auc(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<(f64, RocPoints)> {
    if scores.len() != labels.len() {
        return Err(PyValueError::new_err("scores and labels differ in length"));
    }
    let pairs: Vec<(f64, bool)> = scores.into_iter().zip(labels).collect();
    let curve = roc_auc(&pairs).map_err(to_py)?;
    Ok((curve.auc, curve.points.iter().map(|p| (p.threshold, p.fpr, p.tpr)).collect()))
}

/// Scores every window; returns one dict per window.
#[pyfunction(name = "run_detector")]
#[pyo3(signature = (
    dataset, *, window = 2500, step = None, metric = "chi2", threshold = 0.4, unit = "bytes",
    zero_policy = "count", ordering = "start-end", theta = None, tl = None, labeling_abs = None
))]
#[allow(clippy::too_many_arguments)]
fn py_run_detector<'py>(
    py: Python<'py>,
    dataset: &PyFlowDataset,
    window: usize,
    step: Option<usize>,
    metric: &str,
    threshold: f64,
    unit: &str,
    zero_policy: &str,
    ordering: &str,
    theta: Option<f64>,
    tl: Option<f64>,
    labeling_abs: Option<u32>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = DetectorConfig {
        window: match step {
            Some(s) => WindowSpec::new(window, s),
            None => WindowSpec::half_step(window),
        }
        .map_err(to_py)?,
        unit: parse(unit)?,
        zero_policy: parse(zero_policy)?,
        ordering: parse(ordering)?,
        metric: parse(metric)?,
        kld: match theta {
            Some(t) => KldParams::new(t).map_err(to_py)?,
            None => KldParams::default(),
        },
        threshold_t: threshold,
        labeling: match (tl, labeling_abs) {
            (_, Some(t)) => Labeling::Absolute(t),
            (Some(t), None) => Labeling::Relative(t),
            (None, None) => DetectorConfig::default().labeling,
        },
    };
    let scores = py.detach(|| run_detector(&dataset.inner, &config)).map_err(to_py)?;
    scores
        .iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("index", s.index)?;
            d.set_item("start", s.window.start)?;
            d.set_item("end", s.window.end)?;
            d.set_item("score", s.score)?;
            d.set_item("decision", s.decision)?;
            d.set_item("truth", s.truth)?;
            d.set_item("valid", s.valid)?;
            Ok(d)
        })
        .collect()
}

/// Summary of window scores; non-finite scores count as invalid windows.
#[pyfunction(name = "divergence_stats")]
fn py_divergence_stats<'py>(py: Python<'py>, scores: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let windows: Vec<WindowScore> = scores
        .iter()
        .enumerate()
        .map(|(i, &score)| WindowScore {
            index: i,
            window: WindowIndex { start: i, end: i },
            score,
            decision: false,
            truth: None,
            valid: score.is_finite(),
        })
        .collect();
    let s = divergence_stats(&windows).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("average", s.average)?;
    d.set_item("median", s.median)?;
    d.set_item("minimum", s.minimum)?;
    d.set_item("maximum", s.maximum)?;
    d.set_item("count", s.count)?;
    d.set_item("invalid", s.invalid)?;
    Ok(d)
}

#[pymodule]
fn benflow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BenflowError", m.py().get_type::<BenflowError>())?;
    m.add_class::<PyFlowDataset>()?;
    m.add_function(wrap_pyfunction!(py_benford_reference, m)?)?;
    m.add_function(wrap_pyfunction!(py_first_digit, m)?)?;
    m.add_function(wrap_pyfunction!(py_digit_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(metric, m)?)?;
    m.add_function(wrap_pyfunction!(py_anomaly_score, m)?)?;
    m.add_function(wrap_pyfunction!(py_difference_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(py_windows, m)?)?;
    m.add_function(wrap_pyfunction!(py_label_window, m)?)?;
    m.add_function(wrap_pyfunction!(py_roc_auc, m)?)?;
    m.add_function(wrap_pyfunction!(py_run_detector, m)?)?;
    m.add_function(wrap_pyfunction!(py_divergence_stats, m)?)?;
    m.add("METRICS", SimilarityMetric::ALL.iter().map(|m| m.name()).collect::<Vec<_>>())?;
    Ok(())
}
