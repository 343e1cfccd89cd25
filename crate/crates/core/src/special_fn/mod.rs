//! Deterministic numerical kernels. Everything here is a pure function of
//! its inputs and safe to call from any number of threads.

pub mod cumulant;
pub mod gamma_fns;
pub mod inverse_cdf;
pub mod levy;
pub mod quadrature;
pub mod stable;

pub use cumulant::{cumulant, neg_moment, CumulantFamily, CumulantModel, DensityFn, NumericCumulant};
pub use gamma_fns::{beta_cdf, exp_integral_e1, gamma_cdf, gamma_fn, gamma_pdf, gamma_sf, ln_gamma};
pub use inverse_cdf::NumericInverseCdf;
pub use levy::{levy_exponent, LevyDensityModel, LevyFn, LevyKind, PowerExp};
pub use quadrature::{QuadOptions, Quadrature};
pub use stable::{
    stable_cdf, stable_density, stable_density_quadrature, stable_ln_density, StableParams,
};
