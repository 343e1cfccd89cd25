//! Constructive couplings between positive random variables and random
//! scaling factors, and the Monte Carlo machinery that checks them.
//!
//! The crate is organised bottom-up:
//!
//! - [`special_fn`]: stable densities, cumulant functions, Lévy exponents,
//!   negative moments, adaptive quadrature and numeric inverse CDFs.
//! - [`samplers`]: seeded generators for gamma, beta, positive stable,
//!   exponentially tilted stable variables and the scaling laws `ξ`.
//! - [`measures`]: generalized-gamma random measures, bridges, ranked
//!   weights, stick-breaking Poisson-Dirichlet draws and CRP partitions.
//! - [`couplings`]: joint samplers for `(ξ, T)` pairs and measure couplings
//!   for which `T` (or the normalized measure) is independent of `ξT`.
//! - [`excursions`]: overshoot / undershoot / straddling duration at an
//!   independent exponential time, and their `ξ`-coupling.
//! - [`stats`]: Kolmogorov-Smirnov, distance-correlation permutation,
//!   moment and chi-square tests returning [`stats::StatReport`]s.
//! - [`verify`]: the named claims run by the CLI and the acceptance suite.

#![forbid(unsafe_code)]

pub mod couplings;
pub mod error;
pub mod excursions;
pub mod io;
pub mod measures;
pub mod samplers;
pub mod special_fn;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use samplers::RngStream;

pub use special_fn::StableParams;
