//! Heat kernels of weighted-graph Laplacians: exact kernels on finite graphs,
//! intrinsic metrics, geometric functionals and Gaussian upper bounds.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod linalg;
pub mod metric;
pub mod report;
pub mod scalar;
pub mod semigroup;
pub mod zoo;

pub use error::{Error, Result};
pub use report::{CheckReport, Status, Tally};
pub use scalar::Real;

pub type Graph = graph::WeightedGraph<f64>;
pub type Function = graph::VertexFunction<f64>;
pub type Metric = metric::IntrinsicMetric<f64>;
pub type Heat = semigroup::HeatSystem<f64>;
pub type Weight = metric::LipschitzWeight<f64>;
