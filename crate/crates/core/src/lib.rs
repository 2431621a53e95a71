//! Unsupervised detection of malicious TCP flow windows.
//!
//! Flows are ordered, turned into absolute differences of consecutive flow
//! sizes, and grouped into sliding windows. Each window's first-digit
//! histogram is compared against Benford's law with one of seven
//! goodness-of-fit metrics; the resulting anomaly score is thresholded to
//! raise alerts. The [`evaluation`] module benchmarks the detector with
//! ROC/AUC against labeled data, and [`synth`] produces seeded labeled
//! datasets for self-contained testing.
//!
//! ```
//! use benflow_core::prelude::*;
//!
//! let spec = GeneratorSpec::new(7, 5_000, (1, 7));
//! let dataset = generate(&spec).unwrap();
//! let config = DetectorConfig {
//!     window: WindowSpec::new(1000, 500).unwrap(),
//!     ..DetectorConfig::default()
//! };
//! let scores = run_detector(&dataset, &config).unwrap();
//! assert_eq!(scores.len(), 9);
//! ```

pub mod benford;
pub mod detector;
mod error;
pub mod evaluation;
pub mod flow;
pub mod pipeline;
pub mod similarity;
pub mod synth;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::benford::{benford_reference, digit_histogram, first_digit, Digit, DigitDistribution, ZeroPolicy};
    pub use crate::detector::{
        label_window, resolve_labeling_threshold, run_detector, score_window, DetectorConfig, Labeling, WindowScore,
    };
    pub use crate::evaluation::{divergence_stats, grid_evaluate, roc_auc, window_size_sweep, DivergenceStats, RocCurve};
    pub use crate::flow::{adapt_kdd, order_flows, parse_flow_csv, parse_tshark_conversations, FlowDataset, FlowRecord, OrderingScheme};
    pub use crate::pipeline::{difference_sequence, size_sequence, window_differences, windows, SizeUnit, WindowIndex, WindowSpec};
    pub use crate::similarity::{anomaly_score, KldParams, SimilarityMetric};
    pub use crate::synth::{generate, AttackBurst, BurstPattern, GeneratorSpec};
    pub use crate::{Error, Result};
}
