//! Tag co-clustering for sparse documents-keywords matrices.
//!
//! The pipeline smooths the binary incidence matrix with two Sinkhorn-balanced
//! similarity transitions ([`smoothing`]), agglomerates rows and columns
//! jointly under a cost that multiplies prototype divergence by a cluster
//! size penalty ([`cocluster`]), and picks a cluster count from the merge
//! trace. [`synthgen`] builds labelled checkerboard benchmarks, [`metrics`]
//! scores partitions, and [`spectral`] is the baseline co-clustering.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the CLI uses.

pub mod aggregate;
pub mod cocluster;
pub mod dendrogram;
pub mod error;
pub mod evaluate;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod partition;
pub mod pipeline;
pub mod scalar;
pub mod smoothing;
pub mod spectral;
pub mod synthgen;

pub use aggregate::AggregatedMass;
pub use cocluster::{agglomerate, stopping_criterion, CoclusterConfig, Coupling, CostMode, Engine};
pub use dendrogram::{Axis, Dendrogram, MergeRecord, StepTrace};
pub use error::{Error, Result};
pub use matrix::{DenseMatrix, SparseBinaryMatrix};
pub use partition::{ClusterId, Partition};
pub use scalar::Scalar;

pub type DenseRealMatrix = DenseMatrix<f64>;
pub type AggregatedMassMatrix = AggregatedMass<f64>;
pub type DirectedKlMatrix = cocluster::DirectedKlMatrix<f64>;
pub type MergeRecordF64 = MergeRecord<f64>;
pub type StepTraceF64 = StepTrace<f64>;
pub type DendrogramF64 = Dendrogram<f64>;
pub type EngineF64 = Engine<f64>;
pub type SinkhornResult = smoothing::SinkhornResult<f64>;

pub type DenseMatrixF32 = DenseMatrix<f32>;
pub type DendrogramF32 = Dendrogram<f32>;
