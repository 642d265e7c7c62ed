//! Homogenisation experiments: configuration, the lift and solution
//! ε-sweeps, rate fitting and persistence.

mod config;
mod rate;
mod records;
mod report;
mod theorem_a;
mod theorem_b;

pub use config::{ExperimentConfig, CONFIG_VERSION};
pub use rate::{fit_rate, RateFit, RatePoint};
pub use records::{median, read_rows, read_rows_file, ExperimentRecord, Row};
pub use report::{aggregate, format_report, ReportLine};
pub use theorem_a::{monotone_share, run_theorem_a};
pub use theorem_b::{
    certify_options, monotone_with_slack, run_theorem_b, smooth_driver_gap, theorem_b_seed, SeedOutcome,
};
