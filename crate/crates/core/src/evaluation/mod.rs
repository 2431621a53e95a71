//! ROC/AUC benchmarking, score summaries and parameter sweeps.

mod roc;
mod stats;
mod sweep;

pub use roc::{roc_auc, write_roc_csv, RocCurve, RocPoint};
pub use stats::{divergence_stats, DivergenceStats};
pub use sweep::{
    grid_evaluate, standard_labeling_grid, window_size_sweep, write_grid_csv, write_sweep_csv, GridCell, GridResult,
    SweepCell, ABSOLUTE_LABELING_GRID, RELATIVE_LABELING_GRID, WINDOW_GRID,
};
