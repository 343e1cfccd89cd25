//! Joint samplers `(ξ, T)` and `(ξ, M)` for which `T`, or the normalized
//! measure, is independent of `ξT`.

pub mod algebra;
pub mod factorization;
pub mod measure;
pub mod scalar;

pub use algebra::{
    polynomially_tilted_stable_cdf, stable_gamma_algebra_check, stable_gamma_draw,
    stable_gamma_path_draw, AlgebraDraw,
};
pub use factorization::{factorization_error, linear_grid, FactorizationError};
pub use measure::{couple_gg_measure, couple_pd_bridge, couple_size_biased, MeasureCoupling, PdBridgeDraw};
pub use scalar::{
    couple_mixed_tilt, couple_size_biased_unit, couple_scalar, tilted_draw, ScalarCoupling,
    ScalarCoupler,
};
