//! The `ξ`-coupling of excursion durations for the Lévy densities
//! `λ^{(c)}_ν(t) = κ t^{ν-α-1} e^{-ct}`, `κ = α/Γ(1-α)`, `δ = α - ν`.
//!
//! `ξ` has density `Ψ_ν(b+s) s^{ν-1} / (Γ(ν) ((b+1)^α - b^α))` and, given
//! `ξ = s`, `Δ` has density `∝ (1 - e^{-t}) e^{-(b+s)t} t^{-δ-1}`. Then
//! `ξΔ =d G_ν` independently of `(O, U)`, which are distributed as for
//! the untilted-in-`ν` density `κ t^{-α-1} e^{-bt}`.

use std::sync::Arc;

use rand::Rng;

use super::direct::{split_duration, ExcursionTriple};
use crate::error::{invalid, Result};
use crate::samplers::scalar::{gamma_draw, open_uniform};
use crate::special_fn::{gamma_fn, LevyDensityModel, NumericInverseCdf, StableParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ExcursionCase {
    /// `δ ∈ (0, α)`: generalized gamma process with index `δ`.
    InfiniteActivityGG,
    /// `δ = 0`: gamma process.
    GammaProcess,
    /// `δ < 0`: compound Poisson with `G_{ν-α}/(b+ξ)` jumps.
    CompoundPoisson,
}

impl ExcursionCase {
    pub fn label(&self) -> &'static str {
        match self {
            ExcursionCase::InfiniteActivityGG => "InfiniteActivityGG",
            ExcursionCase::GammaProcess => "GammaProcess",
            ExcursionCase::CompoundPoisson => "CompoundPoisson",
        }
    }

    /// Process representation of `τ^{(b+ξ)}_ν(t)`.
    pub fn representation(&self) -> &'static str {
        match self {
            ExcursionCase::InfiniteActivityGG => {
                "tau_delta(t (b+xi)^delta alpha Gamma(1-delta) / (delta Gamma(1-alpha))) / (b+xi)"
            }
            ExcursionCase::GammaProcess => "gamma(t alpha / Gamma(1-alpha)) / (b+xi)",
            ExcursionCase::CompoundPoisson => {
                "sum of Poisson((b+xi)^(alpha-nu) alpha Gamma(nu-alpha)/Gamma(1-alpha) t) jumps G_(nu-alpha)/(b+xi)"
            }
        }
    }
}

/// `(α, ν, b)` with its case tag.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ThreeCaseModel {
    pub alpha: f64,
    pub nu: f64,
    pub b: f64,
    pub delta: f64,
    pub case: ExcursionCase,
}

/// Classifies `(α, ν, b)` by the sign of `δ = α - ν`.
pub fn three_case_model(alpha: f64, nu: f64, b: f64) -> Result<ThreeCaseModel> {
    StableParams::new(alpha)?;
    if !(nu > 0.0 && nu.is_finite()) {
        return invalid(format!("nu must be positive, got {nu}"));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return invalid(format!("tilt b must be finite and nonnegative, got {b}"));
    }
    let delta = alpha - nu;
    let case = if delta > 0.0 {
        ExcursionCase::InfiniteActivityGG
    } else if delta == 0.0 {
        ExcursionCase::GammaProcess
    } else {
        ExcursionCase::CompoundPoisson
    };
    if delta <= 0.0 && b == 0.0 {
        return invalid(format!("delta = {delta} <= 0 needs b > 0"));
    }
    Ok(ThreeCaseModel {
        alpha,
        nu,
        b,
        delta,
        case,
    })
}

impl ThreeCaseModel {
    /// `κ = α/Γ(1-α)`.
    pub fn kappa(&self) -> f64 {
        self.alpha / gamma_fn(1.0 - self.alpha)
    }

    /// `λ^{(c)}_ν`.
    pub fn levy_at(&self, c: f64) -> Result<LevyDensityModel> {
        LevyDensityModel::power_exp(self.kappa(), self.delta, c)
    }

    /// `λ^{(b)}_ν`.
    pub fn levy(&self) -> Result<LevyDensityModel> {
        self.levy_at(self.b)
    }

    /// `κ t^{-α-1} e^{-bt}`, whose excursions `(O, U, Δ)` match the coupled ones.
    pub fn untilted_levy(&self) -> Result<LevyDensityModel> {
        LevyDensityModel::power_exp(self.kappa(), self.alpha, self.b)
    }

    /// `Ψ_ν(c) = ∫ (1 - e^{-t}) λ^{(c)}_ν(t) dt`, closed form.
    pub fn psi_nu(&self, c: f64) -> Result<f64> {
        self.levy_at(c)?.exponent(1.0)
    }

    /// Jump rate of `τ^{(c)}_ν`, finite only for `δ < 0`.
    pub fn jump_rate(&self, c: f64) -> Option<f64> {
        self.levy_at(c).ok()?.total_mass()
    }

    /// `(b+1)^α - b^α`.
    fn xi_normalizer(&self) -> f64 {
        let (a, b) = (self.alpha, self.b);
        if b == 0.0 {
            1.0
        } else {
            b.powf(a) * (a * (1.0 / b).ln_1p()).exp_m1()
        }
    }

    /// Density of `ξ`.
    pub fn xi_density(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let ln = self.psi_nu(self.b + s)?.ln() + (self.nu - 1.0) * s.ln()
            - crate::special_fn::ln_gamma(self.nu)
            - self.xi_normalizer().ln();
        Ok(ln.exp())
    }
}

/// Draw of `ξ` and the coupled excursion at tilt `b + ξ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExcursionCoupling {
    pub xi: f64,
    pub triple: ExcursionTriple,
    pub model: ThreeCaseModel,
}

impl ExcursionCoupling {
    pub fn xi_delta(&self) -> f64 {
        self.xi * self.triple.duration
    }
}

/// `Δ` with density `∝ (1 - e^{-t}) e^{-ct} t^{-δ-1}`. Writing
/// `1 - e^{-t} = t ∫_0^1 e^{-ut} du` makes it a mixture of
/// `G_{1-δ}/(c+u)` over `u ∝ (c+u)^{δ-1}` on `(0, 1)`.
pub fn tilted_duration_draw<R: Rng + ?Sized>(rng: &mut R, delta: f64, c: f64) -> f64 {
    loop {
        let v = open_uniform(rng);
        let l = (1.0 / c).ln_1p();
        // c + u = c (1 + v r)^{1/δ} with r = (1 + 1/c)^δ - 1
        let u = if delta == 0.0 {
            c * (v * l).exp_m1()
        } else {
            c * ((v * (delta * l).exp_m1()).ln_1p() / delta).exp_m1()
        };
        let t = gamma_draw(rng, 1.0 - delta) / (c + u);
        if t > 0.0 && t.is_finite() {
            return t;
        }
    }
}

/// Reusable sampler of [`ExcursionCoupling`]s; the `ξ` table is built once.
#[derive(Debug, Clone)]
pub struct ExcursionCoupler {
    model: ThreeCaseModel,
    xi: Arc<NumericInverseCdf>,
}

impl ExcursionCoupler {
    pub fn new(model: ThreeCaseModel) -> Result<Self> {
        let m = model;
        let levy = m.levy()?;
        levy.exponent(1.0)?;
        let xi = NumericInverseCdf::from_ln_density(move |s| {
            match m.psi_nu(m.b + s) {
                Ok(p) if p > 0.0 => p.ln() + (m.nu - 1.0) * s.ln(),
                _ => f64::NEG_INFINITY,
            }
        })?;
        Ok(Self {
            model,
            xi: Arc::new(xi),
        })
    }

    pub fn model(&self) -> &ThreeCaseModel {
        &self.model
    }

    /// Normalizer of the `ξ` table; equals `Γ(ν)((b+1)^α - b^α)`.
    pub fn xi_normalizer(&self) -> f64 {
        self.xi.normalizer()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ExcursionCoupling {
        let xi = loop {
            let s = self.xi.sample(rng);
            if s > 0.0 {
                break s;
            }
        };
        let t = tilted_duration_draw(rng, self.model.delta, self.model.b + xi);
        ExcursionCoupling {
            xi,
            triple: split_duration(rng, t),
            model: self.model,
        }
    }
}

/// One coupled draw (builds the `ξ` table on every call).
pub fn couple_excursion<R: Rng + ?Sized>(rng: &mut R, model: ThreeCaseModel) -> Result<ExcursionCoupling> {
    Ok(ExcursionCoupler::new(model)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;
    use crate::special_fn::quadrature::{integrate_positive_log, QuadOptions};
    use crate::stats::ks::ks_one_sample;
    use crate::excursions::direct::excursion_duration_density;
    use std::f64::consts::PI;

    #[test]
    fn case_tags_and_exponents() {
        let m = three_case_model(0.75, 0.25, 0.0).unwrap();
        assert_eq!(m.case, ExcursionCase::InfiniteActivityGG);
        assert!((m.psi_nu(0.0).unwrap() - 0.733_305_800_585_193).abs() < 1e-12);
        let m = three_case_model(0.5, 0.5, 1.0).unwrap();
        assert_eq!(m.case, ExcursionCase::GammaProcess);
        assert!((m.psi_nu(1.0).unwrap() - 0.195_533_209_568_708).abs() < 1e-12);
        let m = three_case_model(0.5, 1.5, 1.0).unwrap();
        assert_eq!(m.case, ExcursionCase::CompoundPoisson);
        assert!((m.psi_nu(1.0).unwrap() - 0.25 / PI.sqrt()).abs() < 1e-12);
        assert!((m.jump_rate(1.0).unwrap() - 0.5 / PI.sqrt()).abs() < 1e-12);
        assert!(three_case_model(0.5, 0.5, 0.0).is_err());
        assert!(three_case_model(0.5, 1.5, 0.0).is_err());
    }

    #[test]
    fn xi_density_integrates_to_one() {
        for &(a, nu, b) in &[(0.75, 0.25, 0.0), (0.75, 0.25, 2.0), (0.5, 0.5, 1.0), (0.5, 1.5, 1.0)] {
            let m = three_case_model(a, nu, b).unwrap();
            let q = integrate_positive_log(|s| m.xi_density(s).unwrap(), 0.0, QuadOptions::tight()).unwrap();
            assert!((q.value - 1.0).abs() < 1e-6, "{a} {nu} {b}: {}", q.value);
            let c = ExcursionCoupler::new(m).unwrap();
            let expect = crate::special_fn::gamma_fn(nu) * m.xi_normalizer();
            assert!((c.xi_normalizer() / expect - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn gamma_mixture_duration_matches_density() {
        let mut rng = RngStream::new(41, 0);
        for &(delta, c) in &[(0.5, 0.3), (0.0, 2.0), (-1.0, 1.0), (0.2, 150.0)] {
            let levy = LevyDensityModel::power_exp(1.0, delta, c).unwrap();
            let table = crate::special_fn::NumericInverseCdf::from_density(move |t| {
                excursion_duration_density(&levy, t).unwrap()
            })
            .unwrap();
            let x: Vec<f64> = (0..20_000).map(|_| tilted_duration_draw(&mut rng, delta, c)).collect();
            let r = ks_one_sample(&x, |t| table.cdf(t), 0.01).unwrap();
            assert!(r.passed, "delta={delta} c={c}: {r:?}");
        }
    }
}
