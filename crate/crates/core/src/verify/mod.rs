//! Reference problems, error measures and the acceptance checks.

pub mod acceptance;
pub mod compaction;
pub mod fem;
pub mod metrics;
pub mod sweep;

pub use compaction::{solve_compaction, CompactionCase, CompactionLoad, CompactionRun, VerticalFrame};
pub use metrics::{error_metrics, loglog_slope, ErrorMetrics};
pub use sweep::{aspect_ratio_sweep, rows_to_csv, SweepConfig, SweepGrid, SweepRow};
