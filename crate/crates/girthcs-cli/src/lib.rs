//! Command-line front end for the girthcs toolkit: matrix analysis,
//! guarantee bounds, certificate verification, one-shot recovery, and the
//! deterministic experiment sweeps behind the CSV reports.

pub mod app;
pub mod experiment;

pub use app::{run, EXIT_DATA, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
