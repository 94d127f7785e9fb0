//! Scenario execution, reference trajectories, logging and metrics.

pub mod log;
pub mod metrics;
pub mod reference;
pub mod run;
pub mod scenario;

pub use log::{LogRecord, TrajectoryLog};
pub use metrics::{MetricSample, Metrics};
pub use reference::reference_circle;
pub use run::{run, run_batch, SimOptions};
pub use scenario::{Scenario, Reference};
