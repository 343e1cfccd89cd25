//! Numeric CDF and inverse CDF for an unnormalized density on `(0, ∞)`.
//!
//! The density is handled in the variable `y = ln t`, so power-law
//! behaviour at either end becomes exponential decay. A table of cumulative
//! masses on sub-intervals of width [`STEP`] is built once; CDF evaluations
//! add a 10-point Gauss rule over the last partial sub-interval and
//! inversion runs safeguarded Newton iterations on top of that.

use std::sync::Arc;

use rand::Rng;

use super::quadrature::{gauss10, integrate, QuadOptions};
use crate::error::{Error, Result};

const STEP: f64 = 1.0 / 16.0;
const Y_MIN: f64 = -744.0;
const Y_MAX: f64 = 709.0;
/// Log-density drop (relative to the peak) at which the tails are cut.
const TAIL_DROP: f64 = 42.0;

type LnDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Immutable, shareable inverse-CDF table.
#[derive(Clone)]
pub struct NumericInverseCdf {
    ln_density: LnDensity,
    /// Peak of the log-density in `y`, subtracted before exponentiating.
    shift: f64,
    y0: f64,
    /// `cum[i]` = scaled mass on `[y0, y0 + i·STEP]`.
    cum: Vec<f64>,
}

impl std::fmt::Debug for NumericInverseCdf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NumericInverseCdf")
            .field("support", &(self.y0.exp(), self.y_end().exp()))
            .field("cells", &(self.cum.len() - 1))
            .finish()
    }
}

impl NumericInverseCdf {
    /// Builds the table from `t ↦ ln p(t)`, where `p` is an unnormalized
    /// density on `(0, ∞)`. `-∞` is allowed.
    pub fn from_ln_density<F>(ln_density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::build(Arc::new(ln_density))
    }

    /// Same as [`Self::from_ln_density`] for a density given on its natural
    /// scale.
    pub fn from_density<F>(density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::build(Arc::new(move |t| density(t).ln()))
    }

    fn build(ln_density: LnDensity) -> Result<Self> {
        let ly = |y: f64| -> f64 {
            let v = ln_density(y.exp()) + y;
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        };
        // Coarse scan for the peak.
        let coarse = 0.25;
        let mut peak = f64::NEG_INFINITY;
        let mut y_peak = 0.0;
        let mut y = -80.0;
        while y <= 80.0 {
            let v = ly(y);
            if v > peak {
                peak = v;
                y_peak = y;
            }
            y += coarse;
        }
        // Wider scan if nothing visible in the central window.
        if !peak.is_finite() {
            let mut y = Y_MIN;
            while y <= Y_MAX {
                let v = ly(y);
                if v > peak {
                    peak = v;
                    y_peak = y;
                }
                y += 1.0;
            }
        }
        if !peak.is_finite() {
            return Err(Error::InverseCdf("density is zero on the scanned range".into()));
        }
        // Refine around the coarse maximum so narrow peaks set the scale.
        let fine = coarse / 128.0;
        let start = y_peak - coarse;
        for k in 0..=256 {
            let y = start + k as f64 * fine;
            let v = ly(y);
            if v > peak {
                peak = v;
                y_peak = y;
            }
        }
        if peak == f64::INFINITY {
            return Err(Error::InverseCdf(format!(
                "density is infinite near t = {}",
                y_peak.exp()
            )));
        }
        // Walk outward from the peak until the log-density has dropped
        // far enough, remembering any higher values met on the way.
        let mut lo = y_peak;
        let mut hi = y_peak;
        let mut running_peak = peak;
        loop {
            let v = ly(lo - 1.0);
            if v > running_peak {
                running_peak = v;
            }
            lo -= 1.0;
            if lo <= Y_MIN {
                if v > running_peak - TAIL_DROP {
                    return Err(Error::InverseCdf(
                        "left tail carries mass below the representable range".into(),
                    ));
                }
                lo = Y_MIN;
                break;
            }
            if v < running_peak - TAIL_DROP && ly(lo - 0.5) < running_peak - TAIL_DROP {
                break;
            }
        }
        loop {
            let v = ly(hi + 1.0);
            if v > running_peak {
                running_peak = v;
            }
            hi += 1.0;
            if hi >= Y_MAX {
                if v > running_peak - TAIL_DROP {
                    return Err(Error::InverseCdf(
                        "right tail carries mass beyond the representable range".into(),
                    ));
                }
                hi = Y_MAX;
                break;
            }
            if v < running_peak - TAIL_DROP && ly(hi + 0.5) < running_peak - TAIL_DROP {
                break;
            }
        }
        let shift = running_peak;
        let cells = ((hi - lo) / STEP).ceil() as usize;
        let mut cum = Vec::with_capacity(cells + 1);
        cum.push(0.0);
        let scaled = |y: f64| (ly(y) - shift).exp();
        let opts = QuadOptions {
            abs_tol: 1e-18,
            rel_tol: 1e-13,
            max_intervals: 200,
        };
        let mut acc = 0.0;
        for i in 0..cells {
            let a = lo + i as f64 * STEP;
            let b = a + STEP;
            let q = integrate(scaled, a, b, opts).or_else(|e| match e {
                Error::QuadratureFailed { estimate, .. } => Ok(super::quadrature::Quadrature {
                    value: estimate,
                    error: 0.0,
                }),
                other => Err(other),
            })?;
            acc += q.value.max(0.0);
            cum.push(acc);
        }
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::InverseCdf("density has no finite positive mass".into()));
        }
        Ok(Self {
            ln_density,
            shift,
            y0: lo,
            cum,
        })
    }

    fn y_end(&self) -> f64 {
        self.y0 + (self.cum.len() - 1) as f64 * STEP
    }

    fn total_scaled(&self) -> f64 {
        *self.cum.last().expect("table is never empty")
    }

    fn scaled_y(&self, y: f64) -> f64 {
        let v = (self.ln_density)(y.exp()) + y - self.shift;
        if v.is_nan() {
            0.0
        } else {
            v.exp()
        }
    }

    /// `∫_0^∞ p(t) dt` of the unnormalized density.
    pub fn normalizer(&self) -> f64 {
        self.total_scaled() * self.shift.exp()
    }

    /// Natural log of [`Self::normalizer`].
    pub fn ln_normalizer(&self) -> f64 {
        self.total_scaled().ln() + self.shift
    }

    /// Normalized density at `t`.
    pub fn pdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        ((self.ln_density)(t) - self.ln_normalizer()).exp()
    }

    fn mass_to(&self, y: f64) -> f64 {
        if y <= self.y0 {
            return 0.0;
        }
        let end = self.y_end();
        if y >= end {
            return self.total_scaled();
        }
        let i = (((y - self.y0) / STEP) as usize).min(self.cum.len() - 2);
        let a = self.y0 + i as f64 * STEP;
        self.cum[i] + gauss10(&|z| self.scaled_y(z), a, y)
    }

    /// Normalized CDF at `t`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        (self.mass_to(t.ln()) / self.total_scaled()).clamp(0.0, 1.0)
    }

    /// Quantile function; `u` is clamped to `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let total = self.total_scaled();
        let target = u.clamp(0.0, 1.0) * total;
        // Cell containing the target.
        let i = match self
            .cum
            .binary_search_by(|c| c.partial_cmp(&target).expect("finite table"))
        {
            Ok(k) => return (self.y0 + k as f64 * STEP).exp(),
            Err(k) => k.clamp(1, self.cum.len() - 1) - 1,
        };
        let mut a = self.y0 + i as f64 * STEP;
        let mut b = a + STEP;
        let base = self.cum[i];
        let mut y = a + STEP * ((target - base) / (self.cum[i + 1] - base)).clamp(0.0, 1.0);
        // Safeguarded Newton on the bracket [a, b].
        let cell_start = a;
        for _ in 0..100 {
            let f = base + gauss10(&|z| self.scaled_y(z), cell_start, y) - target;
            if f > 0.0 {
                b = y;
            } else {
                a = y;
            }
            let d = self.scaled_y(y);
            let mut next = if d > 0.0 { y - f / d } else { f64::NAN };
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            let moved = (next - y).abs();
            y = next;
            if moved <= 1e-12 || (b - a) <= 1e-12 {
                break;
            }
        }
        y.exp()
    }

    /// One draw by inversion of a uniform variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::gamma_fns::gamma_cdf;
    use crate::special_fn::stable::{levy_half_cdf, levy_half_density};

    #[test]
    fn gamma_table_matches_incomplete_gamma() {
        let a = 0.3;
        let inv = NumericInverseCdf::from_ln_density(move |t: f64| (a - 1.0) * t.ln() - t).unwrap();
        let norm = statrs::function::gamma::gamma(a);
        assert!((inv.normalizer() / norm - 1.0).abs() < 1e-10);
        for &t in &[1e-8, 1e-3, 0.1, 0.7, 2.0, 9.0] {
            let want = gamma_cdf(a, t).unwrap();
            assert!((inv.cdf(t) - want).abs() < 1e-11, "t={t}");
        }
        for &u in &[1e-9, 0.01, 0.3, 0.5, 0.99, 1.0 - 1e-9] {
            let t = inv.quantile(u);
            assert!((gamma_cdf(a, t).unwrap() - u).abs() < 1e-11, "u={u}");
        }
    }

    #[test]
    fn heavy_tail_levy_half() {
        let inv = NumericInverseCdf::from_density(levy_half_density).unwrap();
        assert!((inv.normalizer() - 1.0).abs() < 1e-10);
        for &t in &[0.05, 1.0, 100.0, 1e6] {
            assert!((inv.cdf(t) - levy_half_cdf(t)).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn narrow_peak_is_found() {
        // Gamma(4000) in log scale has width ~ 0.016.
        let a = 4000.0;
        let inv = NumericInverseCdf::from_ln_density(move |t: f64| (a - 1.0) * t.ln() - t).unwrap();
        let med = inv.quantile(0.5);
        assert!((med - (a - 1.0 / 3.0)).abs() < 0.05, "{med}");
    }

    #[test]
    fn zero_density_is_an_error() {
        assert!(NumericInverseCdf::from_density(|_| 0.0).is_err());
    }
}
