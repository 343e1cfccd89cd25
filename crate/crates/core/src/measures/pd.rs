//! Ranked weights and the stick-breaking Poisson-Dirichlet reference sampler.

use rand::Rng;

use super::jumps::JumpMeasure;
use crate::error::{invalid, Error, Result};
use crate::samplers::scalar::beta_draw;

/// Nonincreasing probability weights with the mass left unsimulated.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RankedWeights {
    pub p: Vec<f64>,
    pub deficit: f64,
}

impl RankedWeights {
    /// Largest weight (0 for an empty list).
    pub fn p1(&self) -> f64 {
        self.p.first().copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Ranks all jump and atom sizes and divides by `total_mass + tail_bound`,
/// so that `Σp + deficit = 1` with `deficit = tail_bound / (total_mass +
/// tail_bound)`.
pub fn normalize(m: &JumpMeasure) -> Result<RankedWeights> {
    let denom = m.total_mass + m.tail_bound;
    if !(m.total_mass > 0.0 && denom.is_finite()) {
        return invalid(format!("cannot normalize a measure with total mass {}", m.total_mass));
    }
    let mut p: Vec<f64> = m
        .jumps
        .iter()
        .chain(&m.fixed_atoms)
        .map(|j| j.size / denom)
        .collect();
    p.sort_by(|x, y| y.total_cmp(x));
    Ok(RankedWeights {
        p,
        deficit: m.tail_bound / denom,
    })
}

/// Settings for [`stick_breaking_pd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StickBreaking {
    /// Minimum number of sticks.
    pub k_min: usize,
    /// Stop once the unbroken remainder is at most this.
    pub deficit_tol: f64,
    pub max_sticks: usize,
}

impl Default for StickBreaking {
    fn default() -> Self {
        Self {
            k_min: 1000,
            deficit_tol: 1e-6,
            max_sticks: 10_000_000,
        }
    }
}

fn check_pd(alpha: f64, theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return invalid(format!("alpha must lie in [0, 1), got {alpha}"));
    }
    if !(theta > -alpha && theta.is_finite()) {
        return invalid(format!("theta must exceed -alpha = {}, got {theta}", -alpha));
    }
    Ok(())
}

/// Ranked PD(α, θ) weights from `W_k ~ Beta(1-α, θ+kα)` sticks, at least
/// `k_min` of them and more until the remainder is below `deficit_tol`.
pub fn stick_breaking_pd<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    theta: f64,
    opts: StickBreaking,
) -> Result<RankedWeights> {
    check_pd(alpha, theta)?;
    let mut p = Vec::with_capacity(opts.k_min);
    let mut rest = 1.0;
    let mut k = 0usize;
    while k < opts.k_min || rest > opts.deficit_tol {
        if k >= opts.max_sticks {
            return Err(Error::DeficitUnreachable {
                deficit: rest,
                tolerance: opts.deficit_tol,
                sticks: k,
            });
        }
        k += 1;
        let w = beta_draw(rng, 1.0 - alpha, theta + k as f64 * alpha);
        p.push(rest * w);
        rest *= 1.0 - w;
    }
    p.sort_by(|x, y| y.total_cmp(x));
    Ok(RankedWeights { p, deficit: rest })
}

/// Exact draw of the largest PD(α, θ) weight: sticks are broken until the
/// largest piece so far exceeds the unbroken remainder.
pub fn pd_largest_weight<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    theta: f64,
    max_sticks: usize,
) -> Result<f64> {
    check_pd(alpha, theta)?;
    let mut rest = 1.0;
    let mut best: f64 = 0.0;
    for k in 1..=max_sticks {
        let w = beta_draw(rng, 1.0 - alpha, theta + k as f64 * alpha);
        best = best.max(rest * w);
        rest *= 1.0 - w;
        if best >= rest {
            return Ok(best);
        }
    }
    Err(Error::DeficitUnreachable {
        deficit: rest,
        tolerance: best,
        sticks: max_sticks,
    })
}
