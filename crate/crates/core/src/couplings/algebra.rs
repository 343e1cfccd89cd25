//! Stable-gamma algebra: with `ζ = G_{θ/α}` independent of the
//! generalized-gamma subordinator `τ_α` (Lévy density
//! `α t^{-α-1} e^{-t} / Γ(1-α)`),
//! `τ_α(ζ)/ζ^{1/α} ⊥⊥ τ_α(ζ)`, `τ_α(ζ) =d G_θ` and
//! `τ_α(ζ)/ζ^{1/α} =d S_{α,θ}` (density `∝ t^{-θ} f_α(t)`).
//! The path version replaces the numerator by `τ_α(yζ)`.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::samplers::scalar::{gamma_draw, tilted_stable_draw};
use crate::special_fn::{gamma_cdf, stable_ln_density, NumericInverseCdf, StableParams};
use crate::stats::{independence_test, ks_one_sample, StatReport, LEVEL};
use crate::stats::dcor::DCOR_MAX_N;

/// `τ_α(t) =d t^{1/α} X_{α, t^{1/α}}`; zero at `t = 0` without using `rng`.
fn gg_subordinator_at<R: Rng + ?Sized>(rng: &mut R, alpha: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let c = t.powf(1.0 / alpha);
    c * tilted_stable_draw(rng, alpha, c)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AlgebraDraw {
    pub zeta: f64,
    /// `τ_α(ζ)`.
    pub tau: f64,
    /// `τ_α(yζ)`.
    pub tau_y: f64,
}

impl AlgebraDraw {
    /// `τ_α(ζ) / ζ^{1/α}`.
    pub fn rescaled(&self, alpha: f64) -> f64 {
        self.tau / self.zeta.powf(1.0 / alpha)
    }

    /// `τ_α(yζ) / ζ^{1/α}`.
    pub fn rescaled_path(&self, alpha: f64) -> f64 {
        self.tau_y / self.zeta.powf(1.0 / alpha)
    }
}

fn check(theta: f64, y: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return invalid(format!("theta must be positive here, got {theta}"));
    }
    if !(0.0..=1.0).contains(&y) {
        return invalid(format!("y must lie in [0, 1], got {y}"));
    }
    Ok(())
}

/// Scalar version: `ζ`, then `τ_α(ζ)` given `ζ`.
pub fn stable_gamma_draw<R: Rng + ?Sized>(rng: &mut R, p: StableParams, theta: f64) -> Result<AlgebraDraw> {
    check(theta, 1.0)?;
    let a = p.alpha();
    let zeta = gamma_draw(rng, theta / a);
    let tau = gg_subordinator_at(rng, a, zeta);
    Ok(AlgebraDraw {
        zeta,
        tau,
        tau_y: tau,
    })
}

/// Path version: `τ_α(yζ)` and the independent increment
/// `τ_α(ζ) - τ_α(yζ)` at time `(1-y)ζ`. At `y = 1` this consumes the
/// generator exactly like [`stable_gamma_draw`] and returns the same draw.
pub fn stable_gamma_path_draw<R: Rng + ?Sized>(
    rng: &mut R,
    p: StableParams,
    theta: f64,
    y: f64,
) -> Result<AlgebraDraw> {
    check(theta, y)?;
    let a = p.alpha();
    let zeta = gamma_draw(rng, theta / a);
    let tau_y = gg_subordinator_at(rng, a, y * zeta);
    let rest = gg_subordinator_at(rng, a, (1.0 - y) * zeta);
    Ok(AlgebraDraw {
        zeta,
        tau: tau_y + rest,
        tau_y,
    })
}

/// CDF of `S_{α,θ}`, density `∝ t^{-θ} f_α(t)`.
pub fn polynomially_tilted_stable_cdf(p: StableParams, theta: f64) -> Result<NumericInverseCdf> {
    NumericInverseCdf::from_ln_density(move |t| {
        stable_ln_density(p, t).unwrap_or(f64::NEG_INFINITY) - theta * t.ln()
    })
}

/// Runs `n` path draws and reports: `τ_α(ζ) =d G_θ`, `τ_α(ζ)/ζ^{1/α} =d
/// S_{α,θ}`, and independence of `τ_α(yζ)/ζ^{1/α}` and `τ_α(ζ)` (on the
/// first `min(n, 10^4)` draws).
pub fn stable_gamma_algebra_check<R: Rng + ?Sized>(
    rng: &mut R,
    p: StableParams,
    theta: f64,
    y: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<StatReport>> {
    let a = p.alpha();
    let draws: Vec<AlgebraDraw> = (0..n)
        .map(|_| stable_gamma_path_draw(rng, p, theta, y))
        .collect::<Result<_>>()?;
    let tau: Vec<f64> = draws.iter().map(|d| d.tau).collect();
    let resc: Vec<f64> = draws.iter().map(|d| d.rescaled(a)).collect();
    let path: Vec<f64> = draws.iter().map(|d| d.rescaled_path(a)).collect();
    let s_cdf = polynomially_tilted_stable_cdf(p, theta)?;
    let m = n.min(DCOR_MAX_N);
    Ok(vec![
        ks_one_sample(&tau, |v| gamma_cdf(theta, v.max(0.0)).unwrap_or(0.0), LEVEL)?
            .with_claim("tau(zeta) =d G_theta")
            .with_seed(seed),
        ks_one_sample(&resc, |v| s_cdf.cdf(v), LEVEL)?
            .with_claim("tau(zeta)/zeta^(1/alpha) =d S_alpha,theta")
            .with_seed(seed),
        independence_test(&path[..m], &tau[..m], 499, LEVEL, seed)?
            .with_claim("tau(y zeta)/zeta^(1/alpha) indep tau(zeta)"),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;

    #[test]
    fn unit_path_equals_scalar_draw() {
        let p = StableParams::new(0.5).unwrap();
        let mut r1 = RngStream::new(5, 1);
        let mut r2 = RngStream::new(5, 1);
        for _ in 0..100 {
            let a = stable_gamma_draw(&mut r1, p, 1.0).unwrap();
            let b = stable_gamma_path_draw(&mut r2, p, 1.0, 1.0).unwrap();
            assert_eq!(a, b);
        }
        assert!(stable_gamma_draw(&mut r1, p, 0.0).is_err());
        assert!(stable_gamma_path_draw(&mut r1, p, 1.0, 1.5).is_err());
    }
}
