//! Scalar base laws `T₀` described by their cumulant `ψ(s) = -ln E[e^{-sT₀}]`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::gamma_fns::{gamma_pdf, ln_gamma};
use super::quadrature::{integrate_positive_log, integrate_real_line, QuadOptions};
use super::stable::{stable_ln_density, StableParams};
use crate::error::{invalid, Error, Result};

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Cumulant given by a table on a log-spaced grid, interpolated by a
/// monotone cubic (PCHIP) in `(ln s, ln ψ)`, with power-law extrapolation
/// outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericCumulant {
    ln_s: Vec<f64>,
    ln_psi: Vec<f64>,
    slope: Vec<f64>,
}

impl NumericCumulant {
    /// `s` must be strictly increasing and positive; `psi` positive,
    /// nondecreasing and concave (checked on the table).
    pub fn new(s: &[f64], psi: &[f64]) -> Result<Self> {
        if s.len() != psi.len() || s.len() < 3 {
            return invalid("cumulant table needs at least 3 matching (s, psi) points");
        }
        for w in s.windows(2) {
            if !(w[0] > 0.0 && w[1] > w[0]) {
                return invalid("cumulant grid must be positive and strictly increasing");
            }
        }
        for w in psi.windows(2) {
            if !(w[0] > 0.0) || w[1] < w[0] {
                return invalid("tabulated psi must be positive and nondecreasing");
            }
        }
        // Concavity: chord slopes, including the chord from the origin,
        // must not increase.
        let mut prev = psi[0] / s[0];
        for i in 1..s.len() {
            let chord = (psi[i] - psi[i - 1]) / (s[i] - s[i - 1]);
            if chord > prev * (1.0 + 1e-9) + 1e-15 {
                return invalid(format!("tabulated psi is not concave near s = {}", s[i]));
            }
            prev = chord;
        }
        let ln_s: Vec<f64> = s.iter().map(|v| v.ln()).collect();
        let ln_psi: Vec<f64> = psi.iter().map(|v| v.ln()).collect();
        let slope = pchip_slopes(&ln_s, &ln_psi);
        Ok(Self { ln_s, ln_psi, slope })
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let x = s.ln();
        let n = self.ln_s.len();
        let ly = if x <= self.ln_s[0] {
            self.ln_psi[0] + self.slope[0] * (x - self.ln_s[0])
        } else if x >= self.ln_s[n - 1] {
            self.ln_psi[n - 1] + self.slope[n - 1] * (x - self.ln_s[n - 1])
        } else {
            let i = match self.ln_s.binary_search_by(|v| v.total_cmp(&x)) {
                Ok(k) => return self.ln_psi[k].exp(),
                Err(k) => k - 1,
            };
            let h = self.ln_s[i + 1] - self.ln_s[i];
            let t = (x - self.ln_s[i]) / h;
            let (y0, y1) = (self.ln_psi[i], self.ln_psi[i + 1]);
            let (d0, d1) = (self.slope[i], self.slope[i + 1]);
            let t2 = t * t;
            let t3 = t2 * t;
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                + (t3 - 2.0 * t2 + t) * h * d0
                + (-2.0 * t3 + 3.0 * t2) * y1
                + (t3 - t2) * h * d1
        };
        ly.exp()
    }

    /// Power-law exponent of `ψ` beyond the last table point.
    pub fn tail_exponent(&self) -> f64 {
        *self.slope.last().expect("non-empty table")
    }
}

/// Fritsch-Carlson slopes for a monotone piecewise cubic Hermite interpolant.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let v = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if v * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && v.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            v
        }
    };
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
    } else {
        d[0] = end(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
    d
}

/// Base-law family.
#[derive(Debug, Clone, PartialEq)]
pub enum CumulantFamily {
    /// `T₀ = G_a`, `ψ(s) = a ln(1+s)`.
    Gamma { a: f64 },
    /// Positive stable, `ψ(s) = s^α`.
    Stable { alpha: f64 },
    /// Exponentially tilted stable `X_{α,b}`, `ψ(s) = (b+s)^α - b^α`.
    TiltedStable { alpha: f64, b: f64 },
    /// Size-biased `X_{α,b}`: `ψ(s) = (1-α) ln(1+s/b) + (b+s)^α - b^α`.
    SizeBiasedTiltedStable { alpha: f64, b: f64 },
    /// Tabulated cumulant.
    GenericNumeric(NumericCumulant),
}

/// A positive base variable together with its cumulant, optional density
/// and a cache of negative moments `E[T₀^{-ν}]`.
#[derive(Clone)]
pub struct CumulantModel {
    family: CumulantFamily,
    density: Option<DensityFn>,
    neg_moment_cache: Arc<Mutex<HashMap<u64, f64>>>,
}

impl fmt::Debug for CumulantModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulantModel")
            .field("family", &self.family)
            .field("has_density", &self.density.is_some())
            .finish()
    }
}

impl PartialEq for CumulantModel {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
    }
}

fn check_b(b: f64) -> Result<()> {
    if !(b >= 0.0 && b.is_finite()) {
        return invalid(format!("tilt b must be finite and nonnegative, got {b}"));
    }
    Ok(())
}

/// `(b+s)^α - b^α`, accurate for `s ≪ b`.
pub fn tilted_stable_psi(alpha: f64, b: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if b == 0.0 {
        return s.powf(alpha);
    }
    b.powf(alpha) * (alpha * (s / b).ln_1p()).exp_m1()
}

impl CumulantModel {
    fn with_family(family: CumulantFamily) -> Self {
        Self {
            family,
            density: None,
            neg_moment_cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn gamma(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return invalid(format!("gamma shape must be positive, got {a}"));
        }
        Ok(Self::with_family(CumulantFamily::Gamma { a }))
    }

    pub fn stable(p: StableParams) -> Self {
        Self::with_family(CumulantFamily::Stable { alpha: p.alpha() })
    }

    pub fn tilted_stable(p: StableParams, b: f64) -> Result<Self> {
        check_b(b)?;
        Ok(Self::with_family(CumulantFamily::TiltedStable {
            alpha: p.alpha(),
            b,
        }))
    }

    /// Size-biased tilted stable law; `b = 0` is rejected because the
    /// cumulant has a log singularity there.
    pub fn size_biased(p: StableParams, b: f64) -> Result<Self> {
        check_b(b)?;
        if b == 0.0 {
            return invalid("size-biased tilted stable family needs b > 0");
        }
        Ok(Self::with_family(CumulantFamily::SizeBiasedTiltedStable {
            alpha: p.alpha(),
            b,
        }))
    }

    /// Tabulated cumulant with an optional density. A supplied density is
    /// checked to integrate to 1.
    pub fn generic(table: NumericCumulant, density: Option<DensityFn>) -> Result<Self> {
        let mut m = Self::with_family(CumulantFamily::GenericNumeric(table));
        if let Some(d) = density {
            let q = integrate_positive_log(|t| d(t), 0.0, QuadOptions::with_tols(1e-10, 1e-9))?;
            if (q.value - 1.0).abs() > 1e-6 {
                return invalid(format!("density integrates to {} instead of 1", q.value));
            }
            m.density = Some(d);
        }
        Ok(m)
    }

    pub fn family(&self) -> &CumulantFamily {
        &self.family
    }

    /// Stability index for the stable-based families.
    pub fn alpha(&self) -> Option<f64> {
        match self.family {
            CumulantFamily::Stable { alpha }
            | CumulantFamily::TiltedStable { alpha, .. }
            | CumulantFamily::SizeBiasedTiltedStable { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    /// Tilt `b`; 0 for the untilted families.
    pub fn tilt(&self) -> f64 {
        match self.family {
            CumulantFamily::TiltedStable { b, .. }
            | CumulantFamily::SizeBiasedTiltedStable { b, .. } => b,
            _ => 0.0,
        }
    }

    /// `ψ(s)`.
    pub fn psi(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return invalid(format!("cumulant needs s >= 0, got {s}"));
        }
        Ok(self.psi_unchecked(s))
    }

    pub(crate) fn psi_unchecked(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        match &self.family {
            CumulantFamily::Gamma { a } => a * s.ln_1p(),
            CumulantFamily::Stable { alpha } => s.powf(*alpha),
            CumulantFamily::TiltedStable { alpha, b } => tilted_stable_psi(*alpha, *b, s),
            CumulantFamily::SizeBiasedTiltedStable { alpha, b } => {
                (1.0 - alpha) * (s / b).ln_1p() + tilted_stable_psi(*alpha, *b, s)
            }
            CumulantFamily::GenericNumeric(t) => t.eval(s),
        }
    }

    /// Density of `T₀` when known.
    pub fn density(&self, t: f64) -> Option<f64> {
        if let Some(d) = &self.density {
            return Some(if t > 0.0 { d(t) } else { 0.0 });
        }
        self.ln_density(t).map(f64::exp)
    }

    /// `ln f_{T₀}(t)` for the built-in families.
    pub fn ln_density(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(f64::NEG_INFINITY);
        }
        match &self.family {
            CumulantFamily::Gamma { a } => Some((a - 1.0) * t.ln() - t - ln_gamma(*a)),
            CumulantFamily::Stable { alpha } => {
                stable_ln_density(StableParams::new(*alpha).ok()?, t).ok()
            }
            CumulantFamily::TiltedStable { alpha, b } => {
                let f = stable_ln_density(StableParams::new(*alpha).ok()?, t).ok()?;
                Some(f - b * t + b.powf(*alpha))
            }
            CumulantFamily::SizeBiasedTiltedStable { alpha, b } => {
                let f = stable_ln_density(StableParams::new(*alpha).ok()?, t).ok()?;
                Some(
                    (1.0 - alpha) * b.ln() - b * t + b.powf(*alpha) + t.ln() + f - alpha.ln(),
                )
            }
            CumulantFamily::GenericNumeric(_) => self.density.as_ref().map(|d| d(t).ln()),
        }
    }

    /// `E[T₀^{-ν}]`, closed form where available, otherwise through
    /// `Γ(ν)^{-1} ∫_0^∞ s^{ν-1} e^{-ψ(s)} ds`. Results are cached per `ν`.
    pub fn neg_moment(&self, nu: f64) -> Result<f64> {
        if !(nu > 0.0 && nu.is_finite()) {
            return invalid(format!("nu must be positive, got {nu}"));
        }
        let key = nu.to_bits();
        if let Some(v) = self.neg_moment_cache.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = match &self.family {
            CumulantFamily::Stable { alpha } => {
                (ln_gamma(nu / alpha) - ln_gamma(nu)).exp() / alpha
            }
            CumulantFamily::TiltedStable { alpha, b } if *b == 0.0 => {
                (ln_gamma(nu / alpha) - ln_gamma(nu)).exp() / alpha
            }
            CumulantFamily::Gamma { a } => {
                if nu >= *a {
                    return Err(Error::NonIntegrable(format!(
                        "E[G_a^(-nu)] is infinite for nu = {nu} >= a = {a}"
                    )));
                }
                (ln_gamma(a - nu) - ln_gamma(*a)).exp()
            }
            _ => self.neg_moment_quadrature(nu)?,
        };
        self.neg_moment_cache
            .lock()
            .expect("cache lock")
            .insert(key, v);
        Ok(v)
    }

    /// `E[T₀^{-ν}]` from the Laplace identity, ignoring closed forms.
    pub fn neg_moment_quadrature(&self, nu: f64) -> Result<f64> {
        if !(nu > 0.0 && nu.is_finite()) {
            return invalid(format!("nu must be positive, got {nu}"));
        }
        // Integrand in x = ln s: exp(νx - ψ(e^x)).
        let phi = |x: f64| nu * x - self.psi_unchecked(x.exp());
        // The exponent must fall off at least linearly for large s.
        let far = 30.0;
        if phi(far + 20.0) - phi(far) > -1.0 {
            return Err(Error::NonIntegrable(format!(
                "s^(nu-1) exp(-psi(s)) is not integrable at infinity for nu = {nu}"
            )));
        }
        let mut x_peak = 0.0;
        let mut best = f64::NEG_INFINITY;
        let mut x = -40.0;
        while x <= 60.0 {
            let v = phi(x);
            if v > best {
                best = v;
                x_peak = x;
            }
            x += 0.25;
        }
        let q = integrate_real_line(
            |x| (phi(x) - best).exp(),
            x_peak,
            QuadOptions::with_tols(0.0, 1e-12),
        )?;
        Ok((q.value.ln() + best - ln_gamma(nu)).exp())
    }
}

/// `ψ(s)` of `model`.
pub fn cumulant(model: &CumulantModel, s: f64) -> Result<f64> {
    model.psi(s)
}

/// `E[T₀^{-ν}]` of `model`.
pub fn neg_moment(model: &CumulantModel, nu: f64) -> Result<f64> {
    model.neg_moment(nu)
}

/// Density of `G_a` as a [`DensityFn`], handy for generic models.
pub fn gamma_density_fn(a: f64) -> DensityFn {
    Arc::new(move |t| gamma_pdf(a, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn half() -> StableParams {
        StableParams::new(0.5).unwrap()
    }

    #[test]
    fn cumulant_examples() {
        let m = CumulantModel::tilted_stable(half(), 1.0).unwrap();
        assert_eq!(m.psi(0.0).unwrap(), 0.0);
        assert!((m.psi(3.0).unwrap() - 1.0).abs() < 1e-15);
        let m0 = CumulantModel::tilted_stable(half(), 0.0).unwrap();
        assert!((m0.psi(4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(m.psi(-1.0).is_err());
        let g = CumulantModel::gamma(2.0).unwrap();
        assert!((g.psi(1.0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!(CumulantModel::size_biased(half(), 0.0).is_err());
        let sb = CumulantModel::size_biased(half(), 1.0).unwrap();
        let want = 0.5 * 2f64.ln() + 2f64.sqrt() - 1.0;
        assert!((sb.psi(1.0).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn tilted_psi_is_concave_nondecreasing() {
        for &(a, b) in &[(0.3, 0.0), (0.5, 1.0), (0.9, 5.0)] {
            let m = CumulantModel::tilted_stable(StableParams::new(a).unwrap(), b).unwrap();
            let v: Vec<f64> = (0..=100).map(|i| m.psi(i as f64 * 0.1).unwrap()).collect();
            assert_eq!(v[0], 0.0);
            for w in v.windows(3) {
                assert!(w[1] >= w[0]);
                assert!(w[2] - w[1] <= w[1] - w[0] + 1e-14);
            }
        }
    }

    #[test]
    fn neg_moment_examples() {
        let st = CumulantModel::stable(half());
        assert!((st.neg_moment(0.5).unwrap() - 2.0 / PI.sqrt()).abs() < 1e-12);
        let g2 = CumulantModel::gamma(2.0).unwrap();
        assert!((g2.neg_moment(1.0).unwrap() - 1.0).abs() < 1e-14);
        let g1 = CumulantModel::gamma(1.0).unwrap();
        assert!(matches!(g1.neg_moment(1.0), Err(Error::NonIntegrable(_))));
        assert!(matches!(
            g1.neg_moment_quadrature(1.0),
            Err(Error::NonIntegrable(_))
        ));
        assert!((g2.neg_moment_quadrature(1.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stable_neg_moment_quadrature_matches_closed_form() {
        for &a in &[0.2, 0.5, 0.8] {
            for &nu in &[0.25, 0.5, 1.0, 2.5] {
                let m = CumulantModel::stable(StableParams::new(a).unwrap());
                let q = m.neg_moment_quadrature(nu).unwrap();
                let c = m.neg_moment(nu).unwrap();
                assert!(((q - c) / c).abs() < 1e-8, "a={a} nu={nu}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn builtin_densities_integrate_to_one() {
        let models = [
            CumulantModel::gamma(0.7).unwrap(),
            CumulantModel::tilted_stable(half(), 1.0).unwrap(),
            CumulantModel::size_biased(half(), 1.0).unwrap(),
        ];
        for m in &models {
            let q = integrate_positive_log(
                |t| m.density(t).unwrap(),
                0.0,
                QuadOptions::with_tols(1e-11, 1e-10),
            )
            .unwrap();
            assert!((q.value - 1.0).abs() < 1e-7, "{m:?}: {}", q.value);
        }
    }

    #[test]
    fn generic_table_reproduces_gamma_cumulant() {
        let s: Vec<f64> = (0..=80).map(|i| 10f64.powf(-4.0 + i as f64 * 0.1)).collect();
        let psi: Vec<f64> = s.iter().map(|v| 3.0 * v.ln_1p()).collect();
        let t = NumericCumulant::new(&s, &psi).unwrap();
        for &x in &[1e-3, 0.5, 2.0, 77.0] {
            let want = 3.0 * f64::ln_1p(x);
            assert!(((t.eval(x) - want) / want).abs() < 1e-4, "x={x}");
        }
        let m = CumulantModel::generic(t, Some(gamma_density_fn(3.0))).unwrap();
        let v = m.neg_moment(1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-3, "{v}");
    }

    #[test]
    fn generic_table_rejects_convex_input() {
        let s = [0.5, 1.0, 2.0, 4.0];
        let psi = [0.25, 1.0, 4.0, 16.0];
        assert!(NumericCumulant::new(&s, &psi).is_err());
    }
}
