//! Experiment driver for random walks on the torus: configuration, the scan
//! pipeline and its JSON, CSV and SVG outputs.

pub mod config;
pub mod error;
pub mod scan;
pub mod svg;

pub use config::{parse_k_schedule, Policy, RawConfig, ScanConfig, Source};
pub use error::{CliError, CliResult};
pub use scan::{run_scan, Estimator, Method, ScanReport, ScanRow};
