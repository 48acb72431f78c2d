//! Scenario loading, seeded execution, traces and metrics.

pub mod compare;
pub mod metrics;
pub mod scenario;
mod sim;
pub mod trace;

pub use compare::{compare_runs, ComparisonReport, PairComparison};
pub use metrics::{compute_metrics, ExperimentMetrics, MetricBounds};
pub use scenario::{builtin, builtin_names, load_scenario, Scenario};
pub use sim::{run, RunOutput, Simulation};
pub use trace::{TraceFormat, TraceRecord};
