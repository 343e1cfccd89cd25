//! Scaling laws `P_{ψ,ν}(ds) ∝ e^{-ψ(s)} s^{ν-1} ds` and the `H_{α,θ}` pair.

use std::sync::Arc;

use rand::Rng;

use super::scalar::{beta_draw, exp_draw, gamma_draw};
use crate::error::{invalid, Error, Result};
use crate::special_fn::cumulant::{CumulantFamily, CumulantModel};
use crate::special_fn::{ln_gamma, NumericInverseCdf, StableParams};

/// `b^α` above which the tilted-stable `ξ` laws switch from rejection
/// against the `b = 0` law to rejection in the variable `u = (b+s)^α - b^α`.
pub const XI_PLAIN_LIMIT: f64 = 4.0;

#[derive(Debug, Clone)]
enum XiMethod {
    BetaPrime { a: f64 },
    StablePower { alpha: f64 },
    Tilted { alpha: f64, b: f64, size_biased: bool },
    Numeric(Arc<NumericInverseCdf>),
}

/// The law `P_{ψ,ν}` with density `e^{-ψ(s)} s^{ν-1} / (E[T₀^{-ν}] Γ(ν))`.
#[derive(Debug, Clone)]
pub struct XiLaw {
    model: CumulantModel,
    nu: f64,
    normalizer: f64,
    method: XiMethod,
}

impl XiLaw {
    pub fn new(model: CumulantModel, nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return invalid(format!("nu must be positive, got {nu}"));
        }
        let moment = model.neg_moment(nu)?;
        let normalizer = moment * ln_gamma(nu).exp();
        if !(normalizer.is_finite() && normalizer > 0.0) {
            return Err(Error::NonIntegrable(format!(
                "normalizer E[T^-nu] Gamma(nu) = {normalizer}"
            )));
        }
        let method = match model.family() {
            CumulantFamily::Gamma { a } => XiMethod::BetaPrime { a: *a },
            CumulantFamily::Stable { alpha } => XiMethod::StablePower { alpha: *alpha },
            CumulantFamily::TiltedStable { alpha, b } if *b == 0.0 => {
                XiMethod::StablePower { alpha: *alpha }
            }
            CumulantFamily::TiltedStable { alpha, b } => XiMethod::Tilted {
                alpha: *alpha,
                b: *b,
                size_biased: false,
            },
            CumulantFamily::SizeBiasedTiltedStable { alpha, b } => XiMethod::Tilted {
                alpha: *alpha,
                b: *b,
                size_biased: true,
            },
            CumulantFamily::GenericNumeric(_) => {
                let m = model.clone();
                let table = NumericInverseCdf::from_ln_density(move |s| {
                    (nu - 1.0) * s.ln() - m.psi_unchecked(s)
                })?;
                XiMethod::Numeric(Arc::new(table))
            }
        };
        Ok(Self {
            model,
            nu,
            normalizer,
            method,
        })
    }

    pub fn model(&self) -> &CumulantModel {
        &self.model
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `E[T₀^{-ν}] Γ(ν)`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn density(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        ((self.nu - 1.0) * s.ln() - self.model.psi_unchecked(s) - self.normalizer.ln()).exp()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.method {
            XiMethod::BetaPrime { a } => {
                gamma_draw(rng, self.nu) / gamma_draw(rng, a - self.nu)
            }
            XiMethod::StablePower { alpha } => gamma_draw(rng, self.nu / alpha).powf(1.0 / alpha),
            XiMethod::Tilted {
                alpha,
                b,
                size_biased,
            } => xi_tilted_stable_draw(rng, *alpha, *b, self.nu, *size_biased),
            XiMethod::Numeric(t) => loop {
                let s = t.sample(rng);
                if s > 0.0 {
                    return s;
                }
            },
        }
    }
}

/// One draw from `law`.
pub fn sample_xi<R: Rng + ?Sized>(rng: &mut R, law: &XiLaw) -> f64 {
    law.sample(rng)
}

/// `ξ` for the tilted stable family (density `∝ s^{ν-1} e^{-(b+s)^α}`), or
/// for its size-biased version (extra factor `(b+s)^{α-1}`), without
/// computing the normalizer.
pub fn xi_tilted_stable_draw<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    b: f64,
    nu: f64,
    size_biased: bool,
) -> f64 {
    if b == 0.0 {
        debug_assert!(!size_biased, "size-biased law needs b > 0");
        return gamma_draw(rng, nu / alpha).powf(1.0 / alpha);
    }
    let big_b = b.powf(alpha);
    let r = 1.0 / alpha - 1.0;
    if big_b > XI_PLAIN_LIMIT {
        let p = r * (nu - 1.0).max(0.0) + if size_biased { 0.0 } else { r };
        if p <= 0.5 * big_b {
            return xi_u_space(rng, alpha, b, big_b, nu, size_biased, p);
        }
    }
    loop {
        let s = xi_basic_plain(rng, alpha, b, nu);
        if !size_biased {
            return s;
        }
        // ((b+s)/b)^{α-1} <= 1
        let ln_acc = (alpha - 1.0) * (s / b).ln_1p();
        if -exp_draw(rng) < ln_acc {
            return s;
        }
    }
}

/// Basic law by rejection from `G_{ν/α}^{1/α}` with acceptance
/// `exp(s^α - (b+s)^α)`.
fn xi_basic_plain<R: Rng + ?Sized>(rng: &mut R, alpha: f64, b: f64, nu: f64) -> f64 {
    loop {
        let g = gamma_draw(rng, nu / alpha);
        let s = g.powf(1.0 / alpha);
        // s^α - (b+s)^α = g - (b+s)^α
        let ln_acc = g - (b + s).powf(alpha);
        if -exp_draw(rng) < ln_acc {
            return s;
        }
    }
}

/// Rejection in `u = (b+s)^α - b^α` with a `Gamma(ν, 1 - p/B)` proposal,
/// `B = b^α`. With `r = 1/α - 1`, `q = 1 + u/B` and `s'(0) = b/(αB)`, the
/// target in `u` is `s(u)^{ν-1} q^{r(1-m)} e^{-u}` (`m = 1` when size
/// biased) and `s'(0)u <= s(u) <= s'(0) u q^r` bounds the ratio by 1.
fn xi_u_space<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    b: f64,
    big_b: f64,
    nu: f64,
    size_biased: bool,
    p: f64,
) -> f64 {
    let r = 1.0 / alpha - 1.0;
    let slope0 = b / (alpha * big_b);
    let rate = 1.0 - p / big_b;
    let extra = if size_biased { 0.0 } else { r };
    loop {
        let u = gamma_draw(rng, nu) / rate;
        let lq = (u / big_b).ln_1p();
        let s = b * (lq / alpha).exp_m1();
        if !(s > 0.0) {
            continue;
        }
        let ln_ratio = (nu - 1.0) * (s / (slope0 * u)).ln() + extra * lq - p * u / big_b;
        if -exp_draw(rng) < ln_ratio {
            return s;
        }
    }
}

fn check_theta(alpha: f64, theta: f64) -> Result<()> {
    if !(theta > -alpha) || !theta.is_finite() {
        return invalid(format!("theta must exceed -alpha = {}, got {theta}", -alpha));
    }
    Ok(())
}

/// `H_{α,θ} = G_{(θ+α)/α}^{1/α} B_{1-α,θ+α}`.
pub fn sample_h<R: Rng + ?Sized>(rng: &mut R, p: StableParams, theta: f64) -> Result<f64> {
    let a = p.alpha();
    check_theta(a, theta)?;
    let g = gamma_draw(rng, (theta + a) / a).powf(1.0 / a);
    Ok(g * beta_draw(rng, 1.0 - a, theta + a))
}

/// `(ξ_H, H) = G_{(θ+α)/α}^{1/α} (B, 1 - B)` with `B ~ Beta(θ+α, 1-α)`.
pub fn sample_xi_h_pair<R: Rng + ?Sized>(
    rng: &mut R,
    p: StableParams,
    theta: f64,
) -> Result<(f64, f64)> {
    let a = p.alpha();
    check_theta(a, theta)?;
    let g = gamma_draw(rng, (theta + a) / a).powf(1.0 / a);
    // Split B and 1 - B through the two gamma variables so neither
    // coordinate loses precision when B is close to 0 or 1.
    loop {
        let x = gamma_draw(rng, theta + a);
        let y = gamma_draw(rng, 1.0 - a);
        let tot = x + y;
        let (xi, h) = (g * (x / tot), g * (y / tot));
        if xi > 0.0 && h > 0.0 {
            return Ok((xi, h));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;
    use crate::special_fn::quadrature::{integrate_positive_log, QuadOptions};

    fn half() -> StableParams {
        StableParams::new(0.5).unwrap()
    }

    #[test]
    fn densities_integrate_to_one() {
        let laws = [
            XiLaw::new(CumulantModel::gamma(2.0).unwrap(), 1.0).unwrap(),
            XiLaw::new(CumulantModel::tilted_stable(half(), 0.0).unwrap(), 1.0).unwrap(),
            XiLaw::new(CumulantModel::tilted_stable(half(), 2.0).unwrap(), 0.7).unwrap(),
            XiLaw::new(CumulantModel::size_biased(half(), 1.0).unwrap(), 1.5).unwrap(),
        ];
        for law in &laws {
            let q = integrate_positive_log(|s| law.density(s), 0.0, QuadOptions::tight()).unwrap();
            assert!((q.value - 1.0).abs() < 1e-6, "{law:?}: {}", q.value);
        }
    }

    #[test]
    fn gamma_family_needs_nu_below_shape() {
        let m = CumulantModel::gamma(1.0).unwrap();
        assert!(matches!(XiLaw::new(m, 1.0), Err(Error::NonIntegrable(_))));
    }

    #[test]
    fn xi_is_positive() {
        let mut r = RngStream::new(4, 0);
        for &(b, sb) in &[(0.5, false), (30.0, false), (0.5, true), (30.0, true)] {
            for _ in 0..2000 {
                let s = xi_tilted_stable_draw(&mut r, 0.5, b, 1.3, sb);
                assert!(s > 0.0 && s.is_finite());
            }
        }
    }

    #[test]
    fn pair_domain() {
        let mut r = RngStream::new(4, 1);
        assert!(sample_xi_h_pair(&mut r, half(), -0.5).is_err());
        assert!(sample_h(&mut r, half(), -0.6).is_err());
        let (x, h) = sample_xi_h_pair(&mut r, half(), -0.25).unwrap();
        assert!(x > 0.0 && h > 0.0);
    }
}
