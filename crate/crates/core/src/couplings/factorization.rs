//! Deterministic check of the joint density of a scalar coupling. Built
//! as `ξ`-marginal times tilted conditional, the density of `(ξ, T)` must
//! equal `g_ν(st) · f_T(t) · t` (independent `ξT ~ G_ν` and `T`), where
//! `f_T(t) = t^{-ν} f_{T₀}(t) / E[T₀^{-ν}]`.

use crate::error::{invalid, Error, Result};
use crate::samplers::XiLaw;
use crate::special_fn::cumulant::CumulantModel;
use crate::special_fn::quadrature::{integrate_positive_log, QuadOptions};
use crate::special_fn::gamma_pdf;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FactorizationError {
    /// Largest relative gap between the constructed joint density and the
    /// independent-product form.
    pub joint: f64,
    /// Largest relative gap between `∫ joint(s, t) ds` and `f_T(t)`.
    pub marginal: f64,
    pub points: usize,
}

/// Relative errors on the grid `s_grid × t_grid`.
pub fn factorization_error(
    model: &CumulantModel,
    nu: f64,
    s_grid: &[f64],
    t_grid: &[f64],
) -> Result<FactorizationError> {
    if s_grid.iter().chain(t_grid).any(|v| !(*v > 0.0)) {
        return invalid("grid points must be positive");
    }
    if model.density(1.0).is_none() {
        return Err(Error::Unsupported("factorization check needs a base density".into()));
    }
    let law = XiLaw::new(model.clone(), nu)?;
    let moment = model.neg_moment(nu)?;
    let f0 = |t: f64| model.density(t).unwrap_or(0.0);
    let joint = |s: f64, t: f64| law.density(s) * (-s * t + model.psi_unchecked(s)).exp() * f0(t);
    let f_t = |t: f64| t.powf(-nu) * f0(t) / moment;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let mut out = FactorizationError {
        joint: 0.0,
        marginal: 0.0,
        points: s_grid.len() * t_grid.len(),
    };
    for &t in t_grid {
        let ft = f_t(t);
        let marg = integrate_positive_log(|s| joint(s, t), 0.0, QuadOptions::tight())?.value;
        out.marginal = out.marginal.max(rel(marg, ft));
        for &s in s_grid {
            out.joint = out.joint.max(rel(joint(s, t), gamma_pdf(nu, s * t) * ft * t));
        }
    }
    Ok(out)
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_two_unit_nu() {
        let g = linear_grid(0.1, 5.0, 25);
        let e = factorization_error(&CumulantModel::gamma(2.0).unwrap(), 1.0, &g, &g).unwrap();
        assert!(e.joint <= 1e-6 && e.marginal <= 1e-6, "{e:?}");
        assert_eq!(e.points, 625);
    }

    #[test]
    fn wrong_nu_breaks_factorization() {
        // The ξ law for ν = 1 paired with the ν = 0.5 product form must not match.
        let g = linear_grid(0.5, 2.0, 4);
        let m = CumulantModel::gamma(2.0).unwrap();
        let law = XiLaw::new(m.clone(), 1.0).unwrap();
        let joint = law.density(1.0) * (-1.0f64 + m.psi(1.0).unwrap()).exp() * m.density(1.0).unwrap();
        let other = gamma_pdf(0.5, 1.0) * m.density(1.0).unwrap() / m.neg_moment(0.5).unwrap();
        assert!((joint - other).abs() > 1e-3);
        assert!(factorization_error(&m, 1.0, &g, &[0.0]).is_err());
    }
}
