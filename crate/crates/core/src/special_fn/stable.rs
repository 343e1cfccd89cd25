//! Positive α-stable law with Laplace transform `exp(-s^α)`, `0 < α < 1`.
//!
//! Density and CDF use Zolotarev's integral representation over `u ∈ (0, π)`
//! with the function
//! `A(u) = [sin(αu)^α sin((1-α)u)^{1-α} / sin u]^{1/(1-α)}`,
//! which increases from `A(0+) = α^{α/(1-α)}(1-α)` to `+∞`.

use std::f64::consts::PI;

use statrs::function::erf::erfc;

use super::quadrature::{integrate, QuadOptions, Quadrature};
use crate::error::{invalid, Error, Result};

/// Stability index `α ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StableParams {
    alpha: f64,
}

impl StableParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_half(&self) -> bool {
        self.alpha == 0.5
    }
}

/// `ln A(u)` for `u ∈ (0, π)`.
pub fn zolotarev_ln_a(alpha: f64, u: f64) -> f64 {
    let om = 1.0 - alpha;
    if u < 1e-7 {
        // A(u) = A(0+) (1 + O(u²))
        return (alpha * alpha.ln()) / om + om.ln();
    }
    let num = alpha * (alpha * u).sin().ln() + om * (om * u).sin().ln();
    (num - u.sin().ln()) / om
}

pub fn zolotarev_a(alpha: f64, u: f64) -> f64 {
    zolotarev_ln_a(alpha, u).exp()
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || t.is_nan() {
        return invalid(format!("stable density needs t > 0, got {t}"));
    }
    Ok(())
}

/// Closed-form α = 1/2 density `t^{-3/2} e^{-1/(4t)} / (2√π)`.
pub fn levy_half_density(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let ln = -1.5 * t.ln() - 0.25 / t - (2.0 * PI.sqrt()).ln();
    ln.exp()
}

/// Closed-form α = 1/2 CDF `erfc(1 / (2√t))`.
pub fn levy_half_cdf(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    erfc(0.5 / t.sqrt())
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_intervals: 4000,
    }
}

/// Natural log of `f_α(t)` by quadrature, with the integral's relative error
/// estimate. Returns `-∞` when the density underflows.
pub fn stable_ln_density_quadrature(p: StableParams, t: f64) -> Result<(f64, f64)> {
    check_t(t)?;
    let a = p.alpha;
    let om = 1.0 - a;
    let ln_t = t.ln();
    let c = (-a / om * ln_t).exp();
    let a0 = zolotarev_a(a, 0.0);
    if c.is_infinite() {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    // ∫ A(u) exp(-c (A(u) - A0)) du, bounded by the peak value at u = 0
    // when c is large.
    let g = |u: f64| {
        let la = zolotarev_ln_a(a, u);
        let aa = la.exp();
        if !aa.is_finite() {
            return 0.0;
        }
        (la - c * (aa - a0)).exp()
    };
    let q: Quadrature = integrate(g, 0.0, PI, quad_opts())?;
    if q.value <= 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    let ln_f = (a / om).ln() - ln_t / om - PI.ln() - c * a0 + q.value.ln();
    Ok((ln_f, q.error / q.value))
}

/// Density `f_α(t)` by quadrature; values below the representable range
/// are returned as 0.
pub fn stable_density_quadrature(p: StableParams, t: f64) -> Result<Quadrature> {
    let (ln_f, rel) = stable_ln_density_quadrature(p, t)?;
    let value = ln_f.exp();
    Ok(Quadrature {
        value,
        error: rel * value,
    })
}

/// Density `f_α(t)` of the positive stable law with Laplace transform
/// `exp(-s^α)`. Never NaN; underflows to 0 near `t = 0`.
pub fn stable_density(p: StableParams, t: f64) -> Result<f64> {
    check_t(t)?;
    if p.is_half() {
        return Ok(levy_half_density(t));
    }
    Ok(stable_density_quadrature(p, t)?.value)
}

/// `ln f_α(t)`; `-∞` on underflow.
pub fn stable_ln_density(p: StableParams, t: f64) -> Result<f64> {
    check_t(t)?;
    if p.is_half() {
        return Ok(-1.5 * t.ln() - 0.25 / t - (2.0 * PI.sqrt()).ln());
    }
    Ok(stable_ln_density_quadrature(p, t)?.0)
}

/// `P(S_α <= t)` by quadrature of `(1/π) ∫_0^π exp(-c A(u)) du`.
pub fn stable_cdf_quadrature(p: StableParams, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    let a = p.alpha;
    let om = 1.0 - a;
    let c = (-a / om * t.ln()).exp();
    let a0 = zolotarev_a(a, 0.0);
    let g = |u: f64| {
        let aa = zolotarev_a(a, u);
        if !aa.is_finite() {
            return 0.0;
        }
        (-c * (aa - a0)).exp()
    };
    let q = integrate(g, 0.0, PI, quad_opts())?;
    let ln_f = q.value.ln() - c * a0 - PI.ln();
    let v = ln_f.exp();
    if v.is_nan() {
        return Err(Error::QuadratureFailed {
            estimate: q.value,
            error_estimate: q.error,
        });
    }
    Ok(v.min(1.0))
}

/// `P(S_α <= t)`, closed form at α = 1/2.
pub fn stable_cdf(p: StableParams, t: f64) -> Result<f64> {
    if p.is_half() {
        return Ok(levy_half_cdf(t));
    }
    stable_cdf_quadrature(p, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::quadrature::integrate_positive_log;

    fn half() -> StableParams {
        StableParams::new(0.5).unwrap()
    }

    #[test]
    fn rejects_out_of_range_alpha() {
        assert!(StableParams::new(0.0).is_err());
        assert!(StableParams::new(1.0).is_err());
        assert!(StableParams::new(f64::NAN).is_err());
    }

    #[test]
    fn half_closed_form_values() {
        let p = half();
        assert!((stable_density(p, 1.0).unwrap() - 0.219_695_644_733_861).abs() < 1e-14);
        assert!((stable_density(p, 4.0).unwrap() - 0.033_125_441_543_003_6).abs() < 1e-15);
        let tiny = stable_density(p, 1e-4).unwrap();
        assert!(tiny < 1e-300 && !tiny.is_nan());
        assert!(stable_density(p, 0.0).is_err());
        assert!(stable_density(p, -1.0).is_err());
    }

    #[test]
    fn quadrature_matches_half_closed_form() {
        let p = half();
        for &t in &[0.01, 0.05, 0.3, 1.0, 2.0, 7.5, 20.0, 300.0] {
            let q = stable_density_quadrature(p, t).unwrap().value;
            let c = levy_half_density(t);
            assert!(((q - c) / c).abs() < 1e-9, "t={t}: {q} vs {c}");
            let fq = stable_cdf_quadrature(p, t).unwrap();
            let fc = levy_half_cdf(t);
            assert!(((fq - fc) / fc).abs() < 1e-9, "cdf t={t}: {fq} vs {fc}");
        }
    }

    #[test]
    fn quadrature_density_underflows_gracefully() {
        let p = StableParams::new(0.7).unwrap();
        let v = stable_density(p, 1e-6).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn density_integrates_to_one() {
        for &a in &[0.3, 0.5, 0.7, 0.9] {
            let p = StableParams::new(a).unwrap();
            let q = integrate_positive_log(
                |t| stable_density_quadrature(p, t).map(|q| q.value).unwrap_or(f64::NAN),
                0.0,
                QuadOptions::with_tols(1e-9, 1e-9),
            )
            .unwrap();
            assert!((q.value - 1.0).abs() < 1e-6, "alpha={a}: {}", q.value);
        }
    }
}
