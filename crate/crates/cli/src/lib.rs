//! Command-line front end for the `uncertest` library: CSV/TOML ingestion,
//! the full analysis pipeline, text and JSON reports, and plotting data.

pub mod config;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod plot;
pub mod report;

pub use config::{CaseSelection, CommonSelection, PopulationConfig, RunConfig};
pub use error::{CliError, Result};
pub use ingest::{ingest, ingest_text, parse_data, write_data};
pub use pipeline::{run, run_pipeline, Mode};
pub use plot::{emit_plot_data, plot_rows, PlotRow};
pub use report::RunReport;
