//! File ingestion, the FISH clustering baseline, simulation studies and the
//! command-line front end for differential correlation mining.
//!
//! The algorithms live in [`dcm_core`]; this crate adds everything that needs
//! `std`: delimited-text IO, structured reports, a worker pool for
//! replicate-level parallelism, and the `dcm` binary's commands.

pub mod commands;
pub mod error;
pub mod fish;
pub mod io;
pub mod report;
pub mod study;

pub use error::{Error, Result};
