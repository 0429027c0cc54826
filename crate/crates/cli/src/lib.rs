//! Driver library behind the `traversal-lab` binary: config files, parameter
//! scans, CSV and plot-script output, and the acceptance suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

pub mod acceptance;
pub mod config;
pub mod nelson_run;
pub mod output;
pub mod scan;

pub use config::{Axis, LabConfig, Method};
pub use scan::{run_scan, ScanRow, ScanSpec};
