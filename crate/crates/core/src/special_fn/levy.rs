//! Lévy densities of subordinators and their exponents
//! `Ψ(s) = ∫_0^∞ (1 - e^{-st}) λ(t) dt`.

use std::fmt;
use std::sync::Arc;

use super::gamma_fns::{gamma_fn, ln_gamma};
use super::quadrature::{integrate_positive_log, integrate_to_infinity, QuadOptions};
use crate::error::{invalid, Error, Result};

pub type LevyFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `λ(t) = coef · t^{-δ-1} e^{-bt}`, `δ < 1`. `δ > 0` gives an infinite
/// activity generalized-gamma subordinator, `δ = 0` a gamma process and
/// `δ < 0` a compound Poisson process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerExp {
    pub coef: f64,
    pub delta: f64,
    pub b: f64,
}

#[derive(Clone)]
pub enum LevyKind {
    PowerExp(PowerExp),
    Custom(LevyFn),
}

impl fmt::Debug for LevyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevyKind::PowerExp(p) => f.debug_tuple("PowerExp").field(p).finish(),
            LevyKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A Lévy density on `(0, ∞)`.
#[derive(Debug, Clone)]
pub struct LevyDensityModel {
    kind: LevyKind,
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_intervals: 4000,
    }
}

impl LevyDensityModel {
    pub fn power_exp(coef: f64, delta: f64, b: f64) -> Result<Self> {
        if !(coef > 0.0 && coef.is_finite()) {
            return invalid(format!("Lévy density coefficient must be positive, got {coef}"));
        }
        if !(delta < 1.0) || delta.is_nan() {
            return invalid(format!("power exponent delta must be below 1, got {delta}"));
        }
        if !(b >= 0.0 && b.is_finite()) {
            return invalid(format!("tilt b must be finite and nonnegative, got {b}"));
        }
        if delta <= 0.0 && b == 0.0 {
            return invalid(format!(
                "delta = {delta} <= 0 needs b > 0, otherwise the exponent diverges"
            ));
        }
        Ok(Self {
            kind: LevyKind::PowerExp(PowerExp { coef, delta, b }),
        })
    }

    /// Arbitrary positive continuous density; `∫ min(1, t) λ(t) dt` is
    /// checked to be finite.
    pub fn custom(lambda: LevyFn) -> Result<Self> {
        let small = integrate_positive_log(
            |t| if t < 1.0 { t * lambda(t) } else { 0.0 },
            -5.0,
            quad_opts(),
        );
        let large = integrate_to_infinity(|t| lambda(t), 1.0, quad_opts());
        match (small, large) {
            (Ok(a), Ok(b)) if a.value.is_finite() && b.value.is_finite() => {}
            _ => return invalid("Lévy density fails the integrability condition"),
        }
        Ok(Self {
            kind: LevyKind::Custom(lambda),
        })
    }

    pub fn kind(&self) -> &LevyKind {
        &self.kind
    }

    pub fn power_exp_params(&self) -> Option<PowerExp> {
        match self.kind {
            LevyKind::PowerExp(p) => Some(p),
            LevyKind::Custom(_) => None,
        }
    }

    /// `λ(t)`.
    pub fn lambda(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            LevyKind::PowerExp(p) => (p.coef.ln() - (p.delta + 1.0) * t.ln() - p.b * t).exp(),
            LevyKind::Custom(f) => f(t),
        }
    }

    /// `ln λ(t)`.
    pub fn ln_lambda(&self, t: f64) -> f64 {
        match &self.kind {
            LevyKind::PowerExp(p) => p.coef.ln() - (p.delta + 1.0) * t.ln() - p.b * t,
            LevyKind::Custom(f) => f(t).ln(),
        }
    }

    /// The model with density `e^{-ct} λ(t)`.
    pub fn tilted(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return invalid(format!("tilt must be finite and nonnegative, got {c}"));
        }
        match &self.kind {
            LevyKind::PowerExp(p) => Self::power_exp(p.coef, p.delta, p.b + c),
            LevyKind::Custom(f) => {
                let f = f.clone();
                Ok(Self {
                    kind: LevyKind::Custom(Arc::new(move |t| (-c * t).exp() * f(t))),
                })
            }
        }
    }

    /// The model with density `t^ν λ(t)`.
    pub fn polynomially_tilted(&self, nu: f64) -> Result<Self> {
        match &self.kind {
            LevyKind::PowerExp(p) => Self::power_exp(p.coef, p.delta - nu, p.b),
            LevyKind::Custom(f) => {
                let f = f.clone();
                Self::custom(Arc::new(move |t| t.powf(nu) * f(t)))
            }
        }
    }

    /// `Ψ(s)`, closed form for [`PowerExp`], quadrature otherwise.
    pub fn exponent(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return invalid(format!("Lévy exponent needs s >= 0, got {s}"));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            LevyKind::PowerExp(p) => Ok(power_exp_exponent(p, s)),
            LevyKind::Custom(_) => self.exponent_quadrature(s),
        }
    }

    /// `Ψ(s)` by quadrature in `ln t`.
    pub fn exponent_quadrature(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let center = -(s.max(1e-3)).ln();
        let q = integrate_positive_log(
            |t| -(-s * t).exp_m1() * self.lambda(t),
            center,
            quad_opts(),
        )?;
        if !q.value.is_finite() {
            return Err(Error::NonIntegrable("Lévy exponent diverges".into()));
        }
        Ok(q.value)
    }

    /// Total mass `∫ λ`, finite only in the compound Poisson regime.
    pub fn total_mass(&self) -> Option<f64> {
        match &self.kind {
            LevyKind::PowerExp(p) if p.delta < 0.0 => {
                Some(p.coef * gamma_fn(-p.delta) * p.b.powf(p.delta))
            }
            LevyKind::PowerExp(_) => None,
            LevyKind::Custom(f) => integrate_positive_log(|t| f(t), 0.0, quad_opts())
                .ok()
                .map(|q| q.value)
                .filter(|v| v.is_finite()),
        }
    }

    /// Expected jump mass below `x`, `∫_0^x t λ(t) dt`.
    pub fn small_jump_mass(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            LevyKind::PowerExp(p) => {
                // coef b^{δ-1} γ(1-δ, bx), or coef x^{1-δ}/(1-δ) when b = 0.
                let a = 1.0 - p.delta;
                if p.b == 0.0 {
                    return Ok(p.coef * x.powf(a) / a);
                }
                let lower = statrs::function::gamma::gamma_lr(a, p.b * x);
                Ok(p.coef * (ln_gamma(a) - a * p.b.ln()).exp() * lower)
            }
            LevyKind::Custom(f) => {
                let q = super::quadrature::integrate(|t| t * f(t), 0.0, x, quad_opts())?;
                Ok(q.value)
            }
        }
    }
}

fn power_exp_exponent(p: &PowerExp, s: f64) -> f64 {
    let PowerExp { coef, delta, b } = *p;
    if delta == 0.0 {
        return coef * (s / b).ln_1p();
    }
    // (b+s)^δ - b^δ
    let diff = if b == 0.0 {
        s.powf(delta)
    } else {
        b.powf(delta) * (delta * (s / b).ln_1p()).exp_m1()
    };
    if delta > 0.0 {
        coef * gamma_fn(1.0 - delta) / delta * diff
    } else {
        -coef * gamma_fn(-delta) * diff
    }
}

/// `Ψ(s)` of `model`.
pub fn levy_exponent(model: &LevyDensityModel, s: f64) -> Result<f64> {
    model.exponent(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn stable_coef(alpha: f64) -> f64 {
        alpha / gamma_fn(1.0 - alpha)
    }

    #[test]
    fn three_regimes_match_reference_values() {
        // δ > 0: α = 0.75, ν = 0.25, b = 0.
        let m = LevyDensityModel::power_exp(stable_coef(0.75), 0.5, 0.0).unwrap();
        assert!((m.exponent(1.0).unwrap() - 0.733_305_800_585_193).abs() < 1e-13);
        // δ = 0: α = ν = 0.5, b = 1.
        let m = LevyDensityModel::power_exp(stable_coef(0.5), 0.0, 1.0).unwrap();
        assert!((m.exponent(1.0).unwrap() - 0.195_533_209_568_708).abs() < 1e-13);
        // δ < 0: α = 0.5, ν = 1.5, b = 1.
        let m = LevyDensityModel::power_exp(stable_coef(0.5), -1.0, 1.0).unwrap();
        assert!((m.exponent(1.0).unwrap() - 0.25 / PI.sqrt()).abs() < 1e-14);
        assert_eq!(m.exponent(0.0).unwrap(), 0.0);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let cases = [(0.5, 0.0), (0.3, 2.0), (0.0, 1.0), (-1.0, 1.0), (-0.4, 0.3)];
        for &(delta, b) in &cases {
            let m = LevyDensityModel::power_exp(0.7, delta, b).unwrap();
            for &s in &[0.01, 1.0, 30.0] {
                let c = m.exponent(s).unwrap();
                let q = m.exponent_quadrature(s).unwrap();
                assert!(((c - q) / c).abs() < 1e-8, "delta={delta} b={b} s={s}: {c} vs {q}");
            }
        }
    }

    #[test]
    fn inadmissible_parameters_rejected() {
        assert!(LevyDensityModel::power_exp(1.0, 0.0, 0.0).is_err());
        assert!(LevyDensityModel::power_exp(1.0, -0.5, 0.0).is_err());
        assert!(LevyDensityModel::power_exp(1.0, 1.0, 1.0).is_err());
        let bad: LevyFn = Arc::new(|t: f64| t.powf(-2.5));
        assert!(LevyDensityModel::custom(bad).is_err());
    }

    #[test]
    fn gamma_levy_density_exponent_is_log() {
        let m = LevyDensityModel::power_exp(1.0, 0.0, 1.0).unwrap();
        assert!((m.exponent(1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        let custom = LevyDensityModel::custom(Arc::new(|t: f64| (-t).exp() / t)).unwrap();
        assert!((custom.exponent(1.0).unwrap() - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn total_and_small_jump_masses() {
        let m = LevyDensityModel::power_exp(stable_coef(0.5), -1.0, 1.0).unwrap();
        assert!((m.total_mass().unwrap() - 0.5 / PI.sqrt()).abs() < 1e-14);
        let g = LevyDensityModel::power_exp(2.0, 0.5, 1.5).unwrap();
        let want = crate::special_fn::quadrature::integrate(
            |t| t * g.lambda(t),
            0.0,
            0.3,
            QuadOptions::tight(),
        )
        .unwrap()
        .value;
        assert!((g.small_jump_mass(0.3).unwrap() - want).abs() < 1e-10);
    }
}
