//! Experiment harness around the `smgo` optimizer: repeated independent
//! trials on the built-in benchmark functions, per-trial CSV traces,
//! aggregate convergence statistics and SVG convergence plots.

pub mod error;
pub mod experiment;
pub mod plot;
pub mod summary;

pub use error::{CliError, Result};
pub use experiment::{
    run_experiment, run_trial, ExperimentOutcome, ExperimentSpec, IterationRow, Optimizer, RowMode,
    TrialRecord,
};
pub use plot::{emit_plot, render_svg, PlotOptions};
pub use summary::{emit_summary, summarize, OutputFormat, Summary, SummaryRow};

/// Formats a float with 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
