//! Overshoot, undershoot and straddling duration of a subordinator at an
//! independent exponential time `G₁`.
//!
//! `Δ` has density `f_λ(t) = (1 - e^{-t}) λ(t) / Ψ(1)` and, given `Δ = t`,
//! the undershoot is a unit exponential truncated to `(0, t)`: the pair
//! `(U, O)` has density `e^{-u} λ(u + o) / Ψ(1)`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::samplers::scalar::{exp_draw, gamma_draw, open_uniform};
use crate::special_fn::{LevyDensityModel, NumericInverseCdf};

/// `(O, U, Δ)` with `Δ = O + U` exactly.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExcursionTriple {
    pub overshoot: f64,
    pub undershoot: f64,
    pub duration: f64,
}

impl ExcursionTriple {
    pub(crate) fn from_parts(overshoot: f64, undershoot: f64) -> Self {
        Self {
            overshoot,
            undershoot,
            duration: overshoot + undershoot,
        }
    }
}

fn psi_one(model: &LevyDensityModel) -> Result<f64> {
    let psi = model.exponent(1.0)?;
    if !(psi > 0.0 && psi.is_finite()) {
        return Err(Error::NonIntegrable(format!("Psi(1) = {psi}")));
    }
    Ok(psi)
}

/// `f_λ(t)`.
pub fn excursion_duration_density(model: &LevyDensityModel, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok(-(-t).exp_m1() * model.lambda(t) / psi_one(model)?)
}

/// Joint density of `(O, U)` at `(o, u)`: `e^{-u} λ(o + u) / Ψ(1)`.
pub fn overshoot_undershoot_density(model: &LevyDensityModel, o: f64, u: f64) -> Result<f64> {
    if o <= 0.0 || u <= 0.0 {
        return Ok(0.0);
    }
    Ok((-u).exp() * model.lambda(o + u) / psi_one(model)?)
}

/// Unit exponential truncated to `(0, t)`.
pub(crate) fn truncated_exp_draw<R: Rng + ?Sized>(rng: &mut R, t: f64) -> f64 {
    loop {
        let v = open_uniform(rng);
        let u = -(v * (-t).exp_m1()).ln_1p();
        if u > 0.0 && u < t {
            return u;
        }
    }
}

/// Splits a duration into `(O, U)` with `U | Δ` truncated exponential.
pub(crate) fn split_duration<R: Rng + ?Sized>(rng: &mut R, t: f64) -> ExcursionTriple {
    let u = truncated_exp_draw(rng, t);
    ExcursionTriple::from_parts(t - u, u)
}

/// Inverse-CDF sampler of `f_λ`, built once per Lévy density.
#[derive(Debug, Clone)]
pub struct ExcursionSampler {
    duration: Arc<NumericInverseCdf>,
    psi_one: f64,
}

impl ExcursionSampler {
    pub fn new(model: &LevyDensityModel) -> Result<Self> {
        let psi_one = psi_one(model)?;
        let m = model.clone();
        let duration = NumericInverseCdf::from_ln_density(move |t| {
            (-(-t).exp_m1()).ln() + m.ln_lambda(t)
        })?;
        Ok(Self {
            duration: Arc::new(duration),
            psi_one,
        })
    }

    /// `Ψ(1)`.
    pub fn psi_one(&self) -> f64 {
        self.psi_one
    }

    /// CDF of `Δ`.
    pub fn duration_cdf(&self, t: f64) -> f64 {
        self.duration.cdf(t)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ExcursionTriple {
        let t = loop {
            let t = self.duration.sample(rng);
            if t > 0.0 {
                break t;
            }
        };
        split_duration(rng, t)
    }
}

/// One draw of `(O, U, Δ)` from the densities (builds the inverse CDF on
/// every call; use [`ExcursionSampler`] for repeated draws).
pub fn sample_excursion_direct<R: Rng + ?Sized>(
    rng: &mut R,
    model: &LevyDensityModel,
) -> Result<ExcursionTriple> {
    Ok(ExcursionSampler::new(model)?.sample(rng))
}

enum JumpLaw {
    Gamma { shape: f64, rate: f64 },
    Table(Arc<NumericInverseCdf>),
}

/// Path simulation of a compound Poisson subordinator up to first passage
/// above an independent `G₁`.
pub struct PathOracle {
    jumps: JumpLaw,
    rate: f64,
}

impl PathOracle {
    pub fn new(model: &LevyDensityModel) -> Result<Self> {
        let Some(rate) = model.total_mass() else {
            return Err(Error::Unsupported(
                "path oracle needs a finite total Lévy mass".into(),
            ));
        };
        if !(rate > 0.0 && rate.is_finite()) {
            return invalid(format!("compound Poisson rate must be positive, got {rate}"));
        }
        let jumps = match model.power_exp_params() {
            Some(p) => JumpLaw::Gamma {
                shape: -p.delta,
                rate: p.b,
            },
            None => {
                let m = model.clone();
                JumpLaw::Table(Arc::new(NumericInverseCdf::from_ln_density(move |t| {
                    m.ln_lambda(t)
                })?))
            }
        };
        Ok(Self { jumps, rate })
    }

    /// Total jump rate.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn jump<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.jumps {
            JumpLaw::Gamma { shape, rate } => gamma_draw(rng, *shape) / rate,
            JumpLaw::Table(t) => t.sample(rng),
        }
    }

    /// Sums jumps until the running height exceeds `G₁`. Returns the triple
    /// and the number of jumps taken (the local time at passage is that
    /// count of exponential waiting times, which this oracle does not track).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (ExcursionTriple, usize) {
        let g = exp_draw(rng);
        let mut height = 0.0;
        let mut count = 0;
        loop {
            let j = self.jump(rng);
            count += 1;
            if height + j > g {
                return (ExcursionTriple::from_parts(height + j - g, g - height), count);
            }
            height += j;
        }
    }
}

/// One path-oracle draw of `(O, U, Δ)`.
pub fn sample_excursion_path_oracle<R: Rng + ?Sized>(
    rng: &mut R,
    model: &LevyDensityModel,
) -> Result<ExcursionTriple> {
    Ok(PathOracle::new(model)?.sample(rng).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;
    use crate::special_fn::quadrature::{integrate, QuadOptions};

    fn gamma_levy() -> LevyDensityModel {
        LevyDensityModel::power_exp(1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn gamma_levy_duration_density_at_one() {
        // (1 - e^{-1}) e^{-1} / ln 2
        let v = excursion_duration_density(&gamma_levy(), 1.0).unwrap();
        assert!((v - 0.335_490_303_440_279).abs() < 1e-13, "{v}");
    }

    #[test]
    fn joint_density_marginalizes() {
        let m = gamma_levy();
        for &t in &[0.1, 1.0, 3.0, 7.5] {
            let q = integrate(
                |u| overshoot_undershoot_density(&m, t - u, u).unwrap(),
                0.0,
                t,
                QuadOptions::tight(),
            )
            .unwrap();
            let f = excursion_duration_density(&m, t).unwrap();
            assert!(((q.value - f) / f).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn triple_adds_up() {
        let mut rng = RngStream::new(31, 0);
        let s = ExcursionSampler::new(&gamma_levy()).unwrap();
        for _ in 0..1000 {
            let e = s.sample(&mut rng);
            assert_eq!(e.duration, e.overshoot + e.undershoot);
            assert!(e.undershoot > 0.0 && e.undershoot < e.duration);
        }
        assert!(PathOracle::new(&gamma_levy()).is_err());
    }

    #[test]
    fn path_oracle_overshoot_positive() {
        let mut rng = RngStream::new(32, 0);
        let cp = LevyDensityModel::power_exp(0.5 / std::f64::consts::PI.sqrt(), -1.0, 1.0).unwrap();
        let o = PathOracle::new(&cp).unwrap();
        for _ in 0..1000 {
            let (e, k) = o.sample(&mut rng);
            assert!(e.overshoot > 0.0 && k >= 1);
        }
    }
}
