//! Seeded random-variate generators. Every sampler takes any `rand::Rng`;
//! [`RngStream`] is the reproducible stream used throughout the crate.

pub mod rng;
pub mod scalar;
pub mod xi;

pub use rng::RngStream;
pub use scalar::{
    sample_beta, sample_gamma, sample_pos_stable, sample_tilted_stable, stable_subordinator_at,
    AcceptanceStats, TiltedStableSampler,
};
pub use xi::{sample_h, sample_xi, sample_xi_h_pair, xi_tilted_stable_draw, XiLaw};
