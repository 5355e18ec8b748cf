//! File formats, reports and the command-line interface over `graphlim-core`.

pub mod cli;
pub mod error;
pub mod io;
pub mod report;

pub use graphlim_core as core;
