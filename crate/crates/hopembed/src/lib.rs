//! Hop-constrained metric embeddings and the distance structures built on them.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph_core`]: weighted graphs, exact `h`-hop distances and the
//!   finite-completion transform used when some pairs are not `h`-hop connected.
//! * [`ultrametric`]: labeled trees, weighted trees and Steiner point removal.
//! * [`ramsey`]: Ramsey-type embeddings into ultrametrics and the
//!   multiplicative-weights distribution builder.
//! * [`clan`]: one-to-many clan embeddings with chiefs.
//! * [`cover`]: randomized sparse covers.
//! * [`preserve`]: path-tree embeddings and subgraph images.
//! * [`datastructures`]: distance oracle, distance labeling and compact routing.
//! * [`generate`] and [`report`]: graph generators and invariant reports used by
//!   the command-line tool.

#![allow(clippy::needless_range_loop)]

pub mod clan;
pub mod cover;
pub mod datastructures;
mod error;
mod ext_real;
pub mod generate;
pub mod graph_core;
mod measure;
pub mod preserve;
pub mod ramsey;
mod region;
pub mod report;
pub mod rng;
mod scale;
pub mod ultrametric;

pub use error::{Error, Result};
pub use ext_real::ExtReal;
pub use graph_core::{Edge, HopParams, WeightedGraph};
pub use measure::Measure;

/// Relative tolerance used when comparing accumulated path weights.
pub const EPS: f64 = 1e-9;

/// `a <= b` up to the crate-wide relative tolerance.
#[inline]
pub(crate) fn le_tol(a: f64, b: f64) -> bool {
    a <= b + EPS * b.abs().max(1.0)
}

/// Variant of the cluster rule used by the Ramsey and clan constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Scale-by-scale rule whose hop stretch grows with the number of scales.
    Standard,
    /// Rule whose hop stretch depends only on `k` and the measure.
    Alt,
}
