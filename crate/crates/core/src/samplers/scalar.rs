//! Gamma, beta, positive stable and exponentially tilted stable variates.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{invalid, Result};
use crate::special_fn::stable::zolotarev_a;
use crate::special_fn::StableParams;

/// Tilts with `b^α` above this value are sampled by splitting into
/// independent pieces instead of plain rejection.
pub const PLAIN_REJECTION_LIMIT: f64 = 4.0;

fn check_shape(a: f64, what: &str) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return invalid(format!("{what} must be positive and finite, got {a}"));
    }
    Ok(())
}

/// Unit-rate gamma draw; shape is assumed valid.
pub(crate) fn gamma_draw<R: Rng + ?Sized>(rng: &mut R, a: f64) -> f64 {
    let g = Gamma::new(a, 1.0).expect("validated shape");
    loop {
        let x = g.sample(rng);
        if x > 0.0 {
            return x;
        }
    }
}

pub(crate) fn exp_draw<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Uniform on the open interval (0, 1).
pub(crate) fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// `G_a`, a Gamma(a, 1) draw.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, a: f64) -> Result<f64> {
    check_shape(a, "gamma shape")?;
    Ok(gamma_draw(rng, a))
}

pub(crate) fn beta_draw<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    loop {
        let x = gamma_draw(rng, a);
        let y = gamma_draw(rng, b);
        let v = x / (x + y);
        if v > 0.0 && v < 1.0 {
            return v;
        }
    }
}

/// `B_{a,b}` as `G_a / (G_a + G_b)`, strictly inside (0, 1).
pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> Result<f64> {
    check_shape(a, "beta parameter a")?;
    check_shape(b, "beta parameter b")?;
    Ok(beta_draw(rng, a, b))
}

pub(crate) fn stable_draw<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> f64 {
    // Kanter: S = (A(U) / E)^{(1-α)/α}, U ~ Uniform(0, π), E ~ Exp(1).
    loop {
        let u = PI * open_uniform(rng);
        let e = exp_draw(rng);
        let s = (zolotarev_a(alpha, u) / e).powf((1.0 - alpha) / alpha);
        if s > 0.0 && s.is_finite() {
            return s;
        }
    }
}

/// Positive stable draw with `E[e^{-sS}] = e^{-s^α}`.
pub fn sample_pos_stable<R: Rng + ?Sized>(rng: &mut R, p: StableParams) -> f64 {
    stable_draw(rng, p.alpha())
}

/// Running acceptance counts of a tilted stable sampler.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AcceptanceStats {
    pub draws: u64,
    /// Accepted stable proposals (more than `draws` when a draw is split
    /// into pieces).
    pub accepted: u64,
    /// Stable proposals generated (each is one rejection trial).
    pub trials: u64,
}

impl AcceptanceStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.accepted as f64 / self.trials as f64
    }
}

/// `X_{α,b}` with density `e^{-bt + b^α} f_α(t)`.
///
/// For `b^α <= 4` a stable proposal `S` is accepted with probability
/// `e^{-bS}` (expected `e^{b^α}` trials). Larger tilts use
/// `X_{α,b} = Σ_{i≤m} m^{-1/α} X^{(i)}_{α, b m^{-1/α}}` with `m = ⌈b^α⌉`,
/// so every piece has tilt exponent at most 1.
#[derive(Debug, Clone)]
pub struct TiltedStableSampler {
    alpha: f64,
    b: f64,
    stats: AcceptanceStats,
}

impl TiltedStableSampler {
    pub fn new(p: StableParams, b: f64) -> Result<Self> {
        if !(b >= 0.0 && b.is_finite()) {
            return invalid(format!("tilt b must be finite and nonnegative, got {b}"));
        }
        Ok(Self {
            alpha: p.alpha(),
            b,
            stats: AcceptanceStats::default(),
        })
    }

    pub fn stats(&self) -> AcceptanceStats {
        self.stats
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let (x, pieces, trials) = tilted_stable_counted(rng, self.alpha, self.b);
        self.stats.draws += 1;
        self.stats.accepted += pieces;
        self.stats.trials += trials;
        x
    }
}

fn plain_rejection<R: Rng + ?Sized>(rng: &mut R, alpha: f64, b: f64) -> (f64, u64) {
    let mut trials = 0;
    loop {
        trials += 1;
        let s = stable_draw(rng, alpha);
        // Accept when an Exp(1) variate exceeds bS.
        if exp_draw(rng) > b * s {
            return (s, trials);
        }
    }
}

/// Returns the draw, the number of accepted pieces and the number of
/// proposals.
pub(crate) fn tilted_stable_counted<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    b: f64,
) -> (f64, u64, u64) {
    if b == 0.0 {
        return (stable_draw(rng, alpha), 1, 1);
    }
    let big_b = b.powf(alpha);
    if big_b <= PLAIN_REJECTION_LIMIT {
        let (x, t) = plain_rejection(rng, alpha, b);
        return (x, 1, t);
    }
    let m = big_b.ceil();
    let scale = m.powf(-1.0 / alpha);
    let piece_b = b * scale;
    let mut sum = 0.0;
    let mut trials = 0;
    for _ in 0..m as u64 {
        let (x, t) = plain_rejection(rng, alpha, piece_b);
        sum += x;
        trials += t;
    }
    (sum * scale, m as u64, trials)
}

pub(crate) fn tilted_stable_draw<R: Rng + ?Sized>(rng: &mut R, alpha: f64, b: f64) -> f64 {
    tilted_stable_counted(rng, alpha, b).0
}

/// One draw of `X_{α,b}`; `b = 0` gives the untilted stable law.
pub fn sample_tilted_stable<R: Rng + ?Sized>(rng: &mut R, p: StableParams, b: f64) -> Result<f64> {
    if !(b >= 0.0 && b.is_finite()) {
        return invalid(format!("tilt b must be finite and nonnegative, got {b}"));
    }
    Ok(tilted_stable_draw(rng, p.alpha(), b))
}

/// `τ_α(t)`: the stable subordinator at time `t`, `t^{1/α} S`.
pub fn stable_subordinator_at<R: Rng + ?Sized>(rng: &mut R, alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    t.powf(1.0 / alpha) * stable_draw(rng, alpha)
}
