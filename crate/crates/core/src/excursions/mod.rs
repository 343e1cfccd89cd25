//! Excursions straddling an independent exponential time: direct density
//! sampling, a compound-Poisson path oracle, and the `ξ`-coupling of the
//! duration for the power-exponential Lévy densities.

pub mod coupling;
pub mod direct;

pub use coupling::{
    couple_excursion, three_case_model, tilted_duration_draw, ExcursionCase, ExcursionCoupler,
    ExcursionCoupling, ThreeCaseModel,
};
pub use direct::{
    excursion_duration_density, overshoot_undershoot_density, sample_excursion_direct,
    sample_excursion_path_oracle, ExcursionSampler, ExcursionTriple, PathOracle,
};
