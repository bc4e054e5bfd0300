//! Signal files, pipeline runs and benchmark sweeps on top of `sft-core`.

pub mod bench;
pub mod run;
pub mod signal;
pub mod table;

pub use run::{run, Algorithm, MultidimMode, Outcome, Report, RunConfig};
pub use signal::SignalSpec;
