//! Generalized-gamma random measures, their normalized ranked weights,
//! the stick-breaking Poisson-Dirichlet reference sampler and CRP
//! partitions.

pub mod crp;
pub mod jumps;
pub mod pd;

pub use crp::{crp_partition, diversity_estimate, PartitionState};
pub use jumps::{
    bridge_measure, sample_gg_measure, sample_power_exp_measure, Jump, JumpMeasure, Truncation,
    DEFAULT_MAX_JUMPS, DEFAULT_TRUNCATION,
};
pub use pd::{normalize, pd_largest_weight, stick_breaking_pd, RankedWeights, StickBreaking};
