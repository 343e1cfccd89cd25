//! Gamma-family special functions. Incomplete gamma and beta come from
//! `statrs`; the exponential integral is computed here.

use statrs::function::{beta, gamma};

use crate::error::{invalid, Result};

pub use statrs::function::gamma::{gamma as gamma_fn, ln_gamma};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `P(G_a <= x)` for a unit-rate gamma variable.
pub fn gamma_cdf(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return invalid(format!("gamma shape must be positive, got {a}"));
    }
    if x.is_nan() || x < 0.0 {
        return invalid(format!("gamma_cdf needs x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(gamma::gamma_lr(a, x))
}

/// `P(G_a > x)`, accurate in the upper tail.
pub fn gamma_sf(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return invalid(format!("gamma shape must be positive, got {a}"));
    }
    if x.is_nan() || x < 0.0 {
        return invalid(format!("gamma_sf needs x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma::gamma_ur(a, x))
}

/// Density of `G_a` at `x`.
pub fn gamma_pdf(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ((a - 1.0) * x.ln() - x - ln_gamma(a)).exp()
}

/// `P(B_{a,b} <= x)`.
pub fn beta_cdf(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return invalid(format!("beta parameters must be positive, got ({a}, {b})"));
    }
    if x.is_nan() {
        return invalid("beta_cdf at NaN");
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    Ok(beta::beta_reg(a, b, x))
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x <= 1.0 {
        // -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            term *= -x / kf;
            let add = term / kf;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return -EULER_GAMMA - x.ln() - sum;
    }
    // Continued fraction (modified Lentz) for e^{x} E1(x).
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}

/// Solves `E1(x) = y` for `x > 0`, `y > 0`. Returns 0 when the root
/// underflows.
pub fn exp_integral_e1_inv(y: f64) -> f64 {
    if y.is_infinite() {
        return 0.0;
    }
    // Starting point from the small- or large-argument asymptotics.
    let mut lx = if y > 0.5 {
        -EULER_GAMMA - y
    } else {
        // E1(x) ~ e^{-x}/x; x ≈ -ln y - ln(-ln y)
        let l = -y.ln();
        (l - l.max(1.0).ln()).max(0.5).ln()
    };
    if lx < -740.0 {
        return 0.0;
    }
    // Newton in u = ln x: d E1(e^u)/du = -e^{-x}.
    for _ in 0..100 {
        let x = lx.exp();
        let f = exp_integral_e1(x) - y;
        let step = f / (-x).exp();
        let step = step.clamp(-5.0, 5.0);
        lx += step;
        if step.abs() < 1e-15 * lx.abs().max(1.0) {
            break;
        }
    }
    lx.exp()
}
