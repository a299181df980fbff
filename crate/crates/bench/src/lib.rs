//! Monte Carlo harness for the toric-code field decoders: failure-rate
//! estimation, threshold scans, velocity sweeps, runtime statistics and
//! field-profile tables.

pub mod output;
pub mod profile;
pub mod runner;
pub mod selftest;
pub mod spec;
pub mod stats;

pub use output::{Format, CSV_HEADER};
pub use runner::{BenchRecord, ThresholdScan};
pub use spec::{DecoderKind, ExperimentSpec, Point, SpecError};
