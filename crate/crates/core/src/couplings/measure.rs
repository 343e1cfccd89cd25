//! Measure couplings: `ξ` first, then a random measure whose tilt is
//! shifted by `ξ`. The normalized weights are independent of `ξT` and
//! `ξT =d G_ν`.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::measures::{bridge_measure, normalize, sample_gg_measure, JumpMeasure, RankedWeights, Truncation};
use crate::samplers::{sample_xi_h_pair, xi_tilted_stable_draw};
use crate::special_fn::StableParams;

/// Joint draw of `ξ`, a random measure `M`, its ranked weights and `T = M[0,1]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MeasureCoupling {
    pub xi: f64,
    pub measure: JumpMeasure,
    pub weights: RankedWeights,
    pub t: f64,
}

impl MeasureCoupling {
    fn new(xi: f64, measure: JumpMeasure) -> Result<Self> {
        let weights = normalize(&measure)?;
        let t = measure.total_mass;
        Ok(Self {
            xi,
            measure,
            weights,
            t,
        })
    }

    pub fn xi_t(&self) -> f64 {
        self.xi * self.t
    }

    /// Normalized mass of `[0, 1/2]`.
    pub fn half_mass(&self) -> f64 {
        self.measure.mass_up_to(0.5) / (self.measure.total_mass + self.measure.tail_bound)
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu.is_finite()) {
        return invalid(format!("nu must be positive, got {nu}"));
    }
    Ok(())
}

/// `ξ` from the tilted stable law `∝ s^{ν-1} e^{-(b+s)^α}`, then a
/// generalized-gamma measure with tilt `b + ξ`. The weights are PD(α, ν)
/// when `b = 0`.
pub fn couple_gg_measure<R: Rng + ?Sized>(
    rng: &mut R,
    p: StableParams,
    b: f64,
    nu: f64,
    trunc: Truncation,
) -> Result<MeasureCoupling> {
    check_nu(nu)?;
    if !(b >= 0.0 && b.is_finite()) {
        return invalid(format!("tilt b must be finite and nonnegative, got {b}"));
    }
    let xi = xi_tilted_stable_draw(rng, p.alpha(), b, nu, false);
    MeasureCoupling::new(xi, sample_gg_measure(rng, p, b + xi, trunc)?)
}

/// `ξ` from the size-biased law `∝ s^{ν-1} (b+s)^{α-1} e^{-(b+s)^α}`, then
/// a bridge (gg measure plus a `G_{1-α}/(b+ξ)` atom) with tilt `b + ξ`.
/// The total mass is `X_{α,b}^{[ν-1]}`.
pub fn couple_size_biased<R: Rng + ?Sized>(
    rng: &mut R,
    p: StableParams,
    b: f64,
    nu: f64,
    trunc: Truncation,
) -> Result<MeasureCoupling> {
    check_nu(nu)?;
    if !(b > 0.0 && b.is_finite()) {
        return invalid(format!("size-biased coupling needs b > 0, got {b}"));
    }
    let xi = xi_tilted_stable_draw(rng, p.alpha(), b, nu, true);
    MeasureCoupling::new(xi, bridge_measure(rng, p, b + xi, trunc)?)
}

/// Draw of the full-range Poisson-Dirichlet bridge.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PdBridgeDraw {
    pub xi_h: f64,
    pub h: f64,
    pub weights: RankedWeights,
    pub t: f64,
}

impl PdBridgeDraw {
    pub fn xi_h_t(&self) -> f64 {
        self.xi_h * self.t
    }

    /// `(ξ_H + H) T`.
    pub fn scaled_total(&self) -> f64 {
        (self.xi_h + self.h) * self.t
    }
}

/// PD(α, θ) weights for any `θ > -α`: draw `(ξ_H, H)`, build the bridge at
/// `b = ξ_H + H` and normalize. `ξ_H T =d G_{θ+α}` independently of the
/// weights.
pub fn couple_pd_bridge<R: Rng + ?Sized>(
    rng: &mut R,
    p: StableParams,
    theta: f64,
    trunc: Truncation,
) -> Result<PdBridgeDraw> {
    let (xi_h, h) = sample_xi_h_pair(rng, p, theta)?;
    let m = bridge_measure(rng, p, xi_h + h, trunc)?;
    let weights = normalize(&m)?;
    Ok(PdBridgeDraw {
        xi_h,
        h,
        weights,
        t: m.total_mass,
    })
}
