#![no_std]
#![warn(missing_debug_implementations)]

//! Cover trees and the standard pruning dual-tree traversal.
//!
//! The crate is split along the lines of the algorithms it hosts:
//!
//! - [`dataset`], [`metric`], [`analysis`], [`generate`]: point sets, the
//!   Euclidean metric, brute-force oracles (ball counts, expansion constant,
//!   dataset extremes) and deterministic synthetic generators.
//! - [`covertree`]: explicit-representation cover trees with invariant
//!   verification, imbalance measures and packing checks.
//! - [`traversal`]: the pruning dual-tree traversal over a query tree and a
//!   reference set of nodes, with recursion counters and bound calculators.
//! - [`kernels`]: shift-invariant kernels with derivatives, inverses and the
//!   quantities that drive the KDE bound exponent.
//! - [`algorithms`]: nearest-neighbor, approximate KDE and range search rule
//!   sets, their drivers and brute-force oracles.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line live in the `dualtree-cli` crate.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algorithms;
pub mod analysis;
pub mod covertree;
pub mod dataset;
mod error;
pub mod generate;
pub mod kernels;
pub mod math;
pub mod metric;
pub mod traversal;

pub use crate::covertree::{BuildConfig, CoverNode, CoverTree, NodeId, RootPolicy, Scale};
pub use crate::dataset::Dataset;
pub use crate::error::Error;
pub use crate::kernels::{Kernel, KernelFamily};
pub use crate::traversal::{dual_traverse, Score, TraversalCounters, TraversalOptions, TraversalRules};

pub type Result<T, E = Error> = core::result::Result<T, E>;
