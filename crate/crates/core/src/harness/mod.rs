//! Verification reports, Monte Carlo statistics, hull traces and the run
//! configuration shared by the command-line tool.

mod config;
mod montecarlo;
mod observable;
mod trace;
mod verify;

use thiserror::Error;

use crate::affine::RepError;
use crate::series::SeriesError;

pub use config::{parse_rational, ConfigError, OutputFormat, RunConfig};
pub use montecarlo::{
    default_words, martingale_test, observable_names, observable_values, simulate, simulate_path,
    trajectory_json, write_trajectory_csv, AbortedPath, Cell, MartingaleReport, Trajectory, WORD_DEPTH,
};
pub use observable::{observable_current, observable_current_paired};
pub use trace::{trace, trace_grid, write_trace_csv, TracePoint};
pub use verify::{
    verify_annihilator, verify_virasoro, virasoro_test_vectors, CheckLine, VerifyReport, VIRASORO_PAIRS,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("path {path} produced a non-finite coefficient at t = {t}")]
    Degenerate { path: u64, t: f64 },
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}
