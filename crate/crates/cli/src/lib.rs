//! Library side of the `mixassoc` command-line tool: configuration, CSV
//! ingestion, report builders and the LOWESS smoother used for plot data.

pub mod analysis;
pub mod config;
pub mod dataset;
pub mod error;
pub mod lowess;
pub mod simulate;

pub use config::{AnalysisConfig, Kind, OutcomeConfig, PlotOptions};
pub use dataset::{load_dataset, read_dataset, write_dataset, LoadedData};
pub use error::{CliError, Result};
