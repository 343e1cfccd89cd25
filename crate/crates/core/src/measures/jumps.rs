//! Jump representations of subordinators with Lévy density
//! `c · t^{-δ-1} e^{-bt}` on the atom space `[0, 1]`.
//!
//! - `0 < δ < 1`: largest-first jumps of the stable measure `c t^{-δ-1}`
//!   (inverse tail at the arrival times of a unit Poisson process), each
//!   kept independently with probability `e^{-bJ}`. Kept jumps are still in
//!   decreasing order and form a Poisson process with the tilted density.
//! - `δ = 0`: gamma process, jumps `E1^{-1}(Γ_k / c) / b`.
//! - `δ < 0`: compound Poisson, exact.
//!
//! Infinite-activity sums stop once the expected mass of the remaining
//! jumps, `∫_0^J t λ(t) dt`, falls below `truncation` times the mass
//! collected so far.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Error, Result};
use crate::samplers::scalar::{exp_draw, gamma_draw};
use crate::special_fn::gamma_fns::exp_integral_e1_inv;
use crate::special_fn::{gamma_fn, LevyDensityModel, PowerExp, StableParams};

/// Default relative truncation of infinite-activity sums.
pub const DEFAULT_TRUNCATION: f64 = 1e-6;
/// Default cap on generated jump candidates per measure.
pub const DEFAULT_MAX_JUMPS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Jump {
    pub size: f64,
    /// Location in `[0, 1]`.
    pub atom: f64,
}

/// A sampled random measure on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct JumpMeasure {
    /// Poisson jumps, strictly decreasing in size.
    pub jumps: Vec<Jump>,
    /// Extra atoms not part of the Poisson process (e.g. a bridge atom).
    pub fixed_atoms: Vec<Jump>,
    /// Sum of all simulated jump and atom sizes.
    pub total_mass: f64,
    /// Expected mass of the jumps left out by truncation.
    pub tail_bound: f64,
}

/// Compensated (Neumaier) summation.
pub(crate) fn stable_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in it {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl JumpMeasure {
    fn from_parts(jumps: Vec<Jump>, fixed_atoms: Vec<Jump>, tail_bound: f64) -> Self {
        let total_mass = stable_sum(jumps.iter().chain(&fixed_atoms).map(|j| j.size));
        Self {
            jumps,
            fixed_atoms,
            total_mass,
            tail_bound,
        }
    }

    /// Adds a fixed atom and updates the total mass.
    pub fn with_atom(mut self, atom: Jump) -> Self {
        self.fixed_atoms.push(atom);
        self.total_mass = stable_sum(self.jumps.iter().chain(&self.fixed_atoms).map(|j| j.size));
        self
    }

    /// Largest jump or atom.
    pub fn max_size(&self) -> f64 {
        self.jumps
            .iter()
            .chain(&self.fixed_atoms)
            .map(|j| j.size)
            .fold(0.0, f64::max)
    }

    /// Mass of `[0, y]`.
    pub fn mass_up_to(&self, y: f64) -> f64 {
        stable_sum(
            self.jumps
                .iter()
                .chain(&self.fixed_atoms)
                .filter(|j| j.atom <= y)
                .map(|j| j.size),
        )
    }

    /// Every size multiplied by `c > 0`; the tail bound scales with it.
    pub fn scaled(&self, c: f64) -> Self {
        let f = |j: &Jump| Jump {
            size: j.size * c,
            atom: j.atom,
        };
        Self {
            jumps: self.jumps.iter().map(f).collect(),
            fixed_atoms: self.fixed_atoms.iter().map(f).collect(),
            total_mass: self.total_mass * c,
            tail_bound: self.tail_bound * c,
        }
    }
}

/// Options for infinite-activity truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Relative tolerance on the expected remaining mass.
    pub tolerance: f64,
    pub max_jumps: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TRUNCATION,
            max_jumps: DEFAULT_MAX_JUMPS,
        }
    }
}

impl Truncation {
    pub fn new(tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return invalid(format!("truncation must lie in (0, 1), got {tolerance}"));
        }
        Ok(Self {
            tolerance,
            ..Self::default()
        })
    }
}

/// Jumps of the subordinator with Lévy density `time · λ`, `λ` a
/// [`PowerExp`] model, i.e. of `τ(time)`, with uniform atoms.
pub fn sample_power_exp_measure<R: Rng + ?Sized>(
    rng: &mut R,
    model: &LevyDensityModel,
    time: f64,
    trunc: Truncation,
) -> Result<JumpMeasure> {
    let Some(p) = model.power_exp_params() else {
        return Err(Error::Unsupported(
            "jump simulation needs a power-exponential Lévy density".into(),
        ));
    };
    if !(time >= 0.0 && time.is_finite()) {
        return invalid(format!("time must be finite and nonnegative, got {time}"));
    }
    if time == 0.0 {
        return Ok(JumpMeasure::from_parts(Vec::new(), Vec::new(), 0.0));
    }
    let c = p.coef * time;
    if p.delta > 0.0 {
        thinned_stable_jumps(rng, c, p.delta, p.b, trunc)
    } else if p.delta == 0.0 {
        gamma_process_jumps(rng, c, p.b, trunc)
    } else {
        compound_poisson_jumps(rng, c, p, trunc)
    }
}

fn thinned_stable_jumps<R: Rng + ?Sized>(
    rng: &mut R,
    c: f64,
    delta: f64,
    b: f64,
    trunc: Truncation,
) -> Result<JumpMeasure> {
    let a = 1.0 - delta;
    let inv = -1.0 / delta;
    let scale = delta / c;
    let half = delta == 0.5;
    // Cheap bound on ∫_0^J t λ(t) dt, exact when b = 0.
    let rest = |j: f64| c * j.powf(a) / a;
    let mut jumps = Vec::new();
    let mut gamma_k = 0.0;
    let mut acc = 0.0;
    let mut last = f64::INFINITY;
    for k in 0..trunc.max_jumps {
        gamma_k += exp_draw(rng);
        let x = scale * gamma_k;
        // powf dominates the loop; δ = 1/2 is common enough for a fast path.
        let j = if half { 1.0 / (x * x) } else { x.powf(inv) };
        last = j;
        if j <= 0.0 {
            break;
        }
        if keep_with_prob_exp_neg(rng, b * j) {
            jumps.push(Jump {
                size: j,
                atom: rng.random::<f64>(),
            });
            acc += j;
        }
        // The bound only shrinks, so checking in batches just keeps a few
        // extra small jumps.
        if k % 16 == 15 && acc > 0.0 && rest(j) <= trunc.tolerance * acc {
            let tail = small_jump_mass(c, delta, b, j);
            return Ok(JumpMeasure::from_parts(jumps, Vec::new(), tail));
        }
    }
    if last <= 0.0 {
        let tail = small_jump_mass(c, delta, b, last.max(0.0));
        return Ok(JumpMeasure::from_parts(jumps, Vec::new(), tail));
    }
    Err(Error::TruncationNotReached {
        tolerance: trunc.tolerance,
        max_jumps: trunc.max_jumps,
    })
}

/// Bernoulli(e^{-x}) from one uniform; `exp` is only needed when
/// `u > 1 - x` because `e^{-x} >= 1 - x`.
fn keep_with_prob_exp_neg<R: Rng + ?Sized>(rng: &mut R, x: f64) -> bool {
    if x == 0.0 {
        return true;
    }
    let u: f64 = rng.random();
    u <= 1.0 - x || u < (-x).exp()
}

fn small_jump_mass(c: f64, delta: f64, b: f64, j: f64) -> f64 {
    LevyDensityModel::power_exp(c, delta, b)
        .and_then(|m| m.small_jump_mass(j))
        .unwrap_or(f64::INFINITY)
}

fn gamma_process_jumps<R: Rng + ?Sized>(
    rng: &mut R,
    c: f64,
    b: f64,
    trunc: Truncation,
) -> Result<JumpMeasure> {
    let mut jumps = Vec::new();
    let mut gamma_k = 0.0;
    let mut acc = 0.0;
    for _ in 0..trunc.max_jumps {
        gamma_k += exp_draw(rng);
        let j = exp_integral_e1_inv(gamma_k / c) / b;
        // ∫_0^J t c t^{-1} e^{-bt} dt = c (1 - e^{-bJ}) / b
        let tail = -c * (-b * j).exp_m1() / b;
        if j <= 0.0 {
            return Ok(JumpMeasure::from_parts(jumps, Vec::new(), 0.0));
        }
        jumps.push(Jump {
            size: j,
            atom: rng.random::<f64>(),
        });
        acc += j;
        if tail <= trunc.tolerance * acc {
            return Ok(JumpMeasure::from_parts(jumps, Vec::new(), tail));
        }
    }
    Err(Error::TruncationNotReached {
        tolerance: trunc.tolerance,
        max_jumps: trunc.max_jumps,
    })
}

fn compound_poisson_jumps<R: Rng + ?Sized>(
    rng: &mut R,
    c: f64,
    p: PowerExp,
    trunc: Truncation,
) -> Result<JumpMeasure> {
    let shape = -p.delta;
    let rate = c * gamma_fn(shape) * p.b.powf(p.delta);
    let count = if rate > 0.0 {
        Poisson::new(rate)
            .map_err(|e| Error::InvalidParameter(format!("Poisson rate {rate}: {e}")))?
            .sample(rng) as usize
    } else {
        0
    };
    if count > trunc.max_jumps {
        return Err(Error::TruncationNotReached {
            tolerance: trunc.tolerance,
            max_jumps: trunc.max_jumps,
        });
    }
    let mut jumps: Vec<Jump> = (0..count)
        .map(|_| Jump {
            size: gamma_draw(rng, shape) / p.b,
            atom: rng.random::<f64>(),
        })
        .collect();
    jumps.sort_by(|x, y| y.size.total_cmp(&x.size));
    Ok(JumpMeasure::from_parts(jumps, Vec::new(), 0.0))
}

fn stable_levy(alpha: f64, b: f64) -> Result<LevyDensityModel> {
    LevyDensityModel::power_exp(alpha / gamma_fn(1.0 - alpha), alpha, b)
}

/// Generalized-gamma random measure: jumps of the subordinator with Lévy
/// density `α t^{-α-1} e^{-bt} / Γ(1-α)` up to time 1, so that the total
/// mass is `X_{α,b}` (up to truncation).
pub fn sample_gg_measure<R: Rng + ?Sized>(
    rng: &mut R,
    p: StableParams,
    b: f64,
    trunc: Truncation,
) -> Result<JumpMeasure> {
    if !(b >= 0.0 && b.is_finite()) {
        return invalid(format!("tilt b must be finite and nonnegative, got {b}"));
    }
    sample_power_exp_measure(rng, &stable_levy(p.alpha(), b)?, 1.0, trunc)
}

/// Size-biased generalized-gamma measure: a gg measure plus one atom of
/// size `G_{1-α}/b` at a uniform location.
pub fn bridge_measure<R: Rng + ?Sized>(
    rng: &mut R,
    p: StableParams,
    b: f64,
    trunc: Truncation,
) -> Result<JumpMeasure> {
    if !(b > 0.0 && b.is_finite()) {
        return invalid(format!("bridge needs b > 0, got {b}"));
    }
    let m = sample_gg_measure(rng, p, b, trunc)?;
    let size = gamma_draw(rng, 1.0 - p.alpha()) / b;
    let atom = rng.random::<f64>();
    Ok(m.with_atom(Jump { size, atom }))
}
