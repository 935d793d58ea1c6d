//! Entropy-weighted hierarchical agglomerative co-clustering.

mod cost;
mod engine;
mod kl_matrix;
mod stopping;

pub use cost::{
    composite_cost, kl_divergence, kl_j_symmetrized, kl_merge_delta, merge_size_cost,
    KL_ZERO_FLOOR, MERGE_COST_FLOOR,
};
pub use engine::{agglomerate, CoclusterConfig, Coupling, CostMode, Engine, COST_TIE_ABS, COST_TIE_REL};
pub use kl_matrix::{
    col_cluster_distribution, incremental_kl_update, row_cluster_distribution, DirectedKlMatrix,
};
pub use stopping::{stopping_criterion, AxisEstimate, CriterionPoint, StoppingEstimate};
