//! Executable objects of sparse graph-limit theory.
//!
//! Weighted graphs and step graphons, their `L^p` and cut norms, cut-distance
//! brackets, graph and fractional quotients, microcanonical ground-state and
//! free energies, large-deviation ball probabilities and rate functions,
//! upper-regularity certification, monotone rearrangements, and seeded
//! generators for the standard random-graph families.
//!
//! Everything here is pure computation over `alloc`; file formats and the
//! command-line harness live in the `graphlim` crate.
//!
//! Graphons are always step functions. Wherever a quantity is an infimum or
//! supremum that cannot be computed exactly at the given size, the API
//! returns a certified bracket ([`DistanceBound`]) or an explicitly flagged
//! heuristic result ([`EnergyResult::exact`]) rather than a bare number.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod linalg;
pub mod math;
pub mod rng;

pub mod distance;
pub mod graph;
pub mod graphon;
pub mod ld;
pub mod models;
pub mod quotient;
pub mod rearrangement;
pub mod regularity;
pub mod statphys;

pub use distance::{cut_distance, normalized_cut_distance, CutDistanceOptions, DistanceBound};
pub use error::{Error, Result};
pub use graph::{enumerate_quotients, maxcut, Quotient, VertexPartition, WeightedGraph};
pub use graphon::StepGraphon;
pub use quotient::{QuotientSet, StepFractionalPartition};
pub use statphys::{CouplingModel, EnergyResult};
