//! Experiment driver for the harmonic-trap cubic NLS lab: configuration,
//! checkpoints, CSV/JSON outputs, sweeps and the growth verdict.
//!
//! The numerical library is re-exported so downstream code needs one dependency.

pub use hnls_core::*;

pub mod checkpoint;
pub mod config;
pub mod experiments;
pub mod fit;
pub mod output;
pub mod record;
pub mod simulate;
pub mod sweep;
