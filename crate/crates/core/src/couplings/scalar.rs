//! Scalar couplings: `ξ ~ P_{ψ,ν}` and `T | ξ = s` the exponential tilt of
//! `T₀` by `s`. Then `T ⊥⊥ ξT`, `ξT =d G_ν` and `T =d T₀^{[ν]}`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::samplers::scalar::{gamma_draw, tilted_stable_draw};
use crate::samplers::{xi_tilted_stable_draw, XiLaw};
use crate::special_fn::cumulant::{CumulantFamily, CumulantModel};
use crate::special_fn::{NumericInverseCdf, StableParams};

/// One joint draw `(ξ, T)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScalarCoupling {
    pub xi: f64,
    pub t: f64,
}

impl ScalarCoupling {
    pub fn xi_t(&self) -> f64 {
        self.xi * self.t
    }
}

/// Reusable sampler for one `(model, ν)` pair; the `ξ` law (and its
/// inverse-CDF table, if any) is built once.
#[derive(Debug, Clone)]
pub struct ScalarCoupler {
    law: XiLaw,
}

impl ScalarCoupler {
    pub fn new(model: CumulantModel, nu: f64) -> Result<Self> {
        if let CumulantFamily::GenericNumeric(_) = model.family() {
            if model.density(1.0).is_none() {
                return Err(Error::Unsupported(
                    "conditional tilting of a tabulated cumulant needs a density".into(),
                ));
            }
        }
        Ok(Self {
            law: XiLaw::new(model, nu)?,
        })
    }

    pub fn law(&self) -> &XiLaw {
        &self.law
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ScalarCoupling> {
        let xi = self.law.sample(rng);
        let t = tilted_draw(rng, self.law.model(), xi)?;
        Ok(ScalarCoupling { xi, t })
    }
}

/// `T₀^{(s)}`, the law with density `e^{-st + ψ(s)} f_{T₀}(t)`.
pub fn tilted_draw<R: Rng + ?Sized>(rng: &mut R, model: &CumulantModel, s: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return invalid(format!("tilt must be finite and nonnegative, got {s}"));
    }
    Ok(match model.family() {
        CumulantFamily::Gamma { a } => gamma_draw(rng, *a) / (1.0 + s),
        CumulantFamily::Stable { alpha } => tilted_stable_draw(rng, *alpha, s),
        CumulantFamily::TiltedStable { alpha, b } => tilted_stable_draw(rng, *alpha, b + s),
        CumulantFamily::SizeBiasedTiltedStable { alpha, b } => {
            let c = b + s;
            tilted_stable_draw(rng, *alpha, c) + gamma_draw(rng, 1.0 - alpha) / c
        }
        CumulantFamily::GenericNumeric(_) => {
            let m = Arc::new(model.clone());
            let table = NumericInverseCdf::from_ln_density(move |t| {
                m.ln_density(t).unwrap_or(f64::NEG_INFINITY) - s * t
            })?;
            table.sample(rng)
        }
    })
}

/// One draw of the coupling for `(model, ν)`. Builds the `ξ` law on every
/// call; use [`ScalarCoupler`] for repeated draws.
pub fn couple_scalar<R: Rng + ?Sized>(
    rng: &mut R,
    model: &CumulantModel,
    nu: f64,
) -> Result<ScalarCoupling> {
    ScalarCoupler::new(model.clone(), nu)?.sample(rng)
}

/// Tilted-stable coupling with a random tilt: `b` is drawn by `draw_b`,
/// then `ξ` from the `(α, b, ν)` law and `T = X_{α, b+ξ}`.
pub fn couple_mixed_tilt<R, F>(
    rng: &mut R,
    p: StableParams,
    nu: f64,
    mut draw_b: F,
) -> Result<ScalarCoupling>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> f64,
{
    if !(nu > 0.0 && nu.is_finite()) {
        return invalid(format!("nu must be positive, got {nu}"));
    }
    let b = draw_b(rng);
    if !(b >= 0.0 && b.is_finite()) {
        return invalid(format!("random tilt must be finite and nonnegative, got {b}"));
    }
    let a = p.alpha();
    let xi = xi_tilted_stable_draw(rng, a, b, nu, false);
    let t = tilted_stable_draw(rng, a, b + xi);
    Ok(ScalarCoupling { xi, t })
}

/// The size-biased coupling at `ν = 1` without rejection: `b + ξ = Z =
/// (G₁ + b^α)^{1/α}` and `T = X_{α,Z} + G_{1-α}/Z`.
pub fn couple_size_biased_unit<R: Rng + ?Sized>(
    rng: &mut R,
    p: StableParams,
    b: f64,
) -> Result<ScalarCoupling> {
    if !(b > 0.0 && b.is_finite()) {
        return invalid(format!("size-biased coupling needs b > 0, got {b}"));
    }
    let a = p.alpha();
    let z = (gamma_draw(rng, 1.0) + b.powf(a)).powf(1.0 / a);
    let t = tilted_stable_draw(rng, a, z) + gamma_draw(rng, 1.0 - a) / z;
    Ok(ScalarCoupling { xi: z - b, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;
    use crate::special_fn::gamma_cdf;
    use crate::stats::ks::ks_one_sample;

    #[test]
    fn gamma_family_marginals() {
        let mut rng = RngStream::new(11, 0);
        let c = ScalarCoupler::new(CumulantModel::gamma(2.0).unwrap(), 1.0).unwrap();
        let draws: Vec<ScalarCoupling> = (0..20_000).map(|_| c.sample(&mut rng).unwrap()).collect();
        let t: Vec<f64> = draws.iter().map(|d| d.t).collect();
        let xt: Vec<f64> = draws.iter().map(ScalarCoupling::xi_t).collect();
        assert!(ks_one_sample(&t, |v| -(-v).exp_m1(), 0.01).unwrap().passed);
        assert!(ks_one_sample(&xt, |v| gamma_cdf(1.0, v).unwrap(), 0.01).unwrap().passed);
    }

    #[test]
    fn size_biased_unit_route() {
        let mut rng = RngStream::new(12, 0);
        let p = StableParams::new(0.5).unwrap();
        let xt: Vec<f64> = (0..20_000)
            .map(|_| couple_size_biased_unit(&mut rng, p, 1.0).unwrap().xi_t())
            .collect();
        assert!(ks_one_sample(&xt, |v| gamma_cdf(1.0, v).unwrap(), 0.01).unwrap().passed);
        assert!(couple_size_biased_unit(&mut rng, p, 0.0).is_err());
    }
}
