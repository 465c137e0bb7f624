//! File formats, the corpus benchmark harness and report writers around
//! [`parsetalk_core`]. The `parsetalk` binary is a thin layer over this
//! crate.

pub mod config;
pub mod corpus;
pub mod format;
pub mod harness;
pub mod report;

pub use parsetalk_core as core;
