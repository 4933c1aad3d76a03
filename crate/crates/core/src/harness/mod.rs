//! Seeded Monte-Carlo sweeps, IMSE and timing over the generating models.

mod bench;
mod config;
mod csvio;
mod imse;
mod sweep;

pub use bench::{bench_complexity, log_log_slope, BenchReport, BenchRow};
pub use config::{FcRule, SweepConfig};
pub use csvio::{read_records, summarize, write_imse, write_records, write_summary, CellSummary, IMSE_HEADER, RECORD_HEADER};
pub use imse::{imse, imse_table, ImsePoint, ImseRow, ImseValue};
pub use sweep::{cell_theory, estimate_measure, run_sweep, trial_seed, CellTheory, SweepOutput, SweepRecord};
