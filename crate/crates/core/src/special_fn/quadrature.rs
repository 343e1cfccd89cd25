//! Adaptive Gauss-Kronrod (10/21 point) quadrature with global subdivision.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_021_645_920,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], .., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Integral estimate with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Tolerances for [`integrate`]. Convergence means
/// `error <= max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn tight() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }

    pub fn with_tols(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// One 21-point Kronrod rule on `[a, b]` with the QUADPACK error heuristic.
/// Non-finite integrand values are treated as zero.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Quadrature {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = finite_or_zero(f(center));
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = finite_or_zero(f(center - dx));
        let f2 = finite_or_zero(f(center + dx));
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Quadrature { value, error }
}

/// Fixed 10-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss10<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (k, w) in WG.iter().enumerate() {
        let dx = half * XGK[2 * k + 1];
        s += w * (finite_or_zero(f(center - dx)) + finite_or_zero(f(center + dx)));
    }
    s * half
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integrate needs finite limits, got [{a}, {b}]"
        )));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let first = gk21(&f, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a: lo,
        b: hi,
        value: first.value,
        error: first.error,
    });
    let mut total = first.value;
    let mut total_err = first.error;
    // Segments too narrow to split further.
    let mut frozen_err = 0.0;
    let mut frozen_val = 0.0;
    let mut count = 1usize;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if count >= opts.max_intervals {
            return Err(Error::QuadratureFailed {
                estimate: sign * total,
                error_estimate: total_err,
            });
        }
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) || (seg.b - seg.a) < 1e-15 * mid.abs().max(1e-300) {
            frozen_err += seg.error;
            frozen_val += seg.value;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = gk21(&f, seg.a, mid);
        let right = gk21(&f, mid, seg.b);
        total += left.value + right.value - seg.value;
        total_err += left.error + right.error - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: left.value,
            error: left.error,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: right.value,
            error: right.error,
        });
        count += 1;
    }
    // Re-sum to shed the drift of the running updates.
    let value: f64 = heap.iter().map(|s| s.value).sum::<f64>() + frozen_val;
    let error: f64 = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
    let target = opts.abs_tol.max(opts.rel_tol * value.abs());
    if error > target && frozen_err > 0.0 && frozen_err > 0.5 * error {
        return Err(Error::QuadratureFailed {
            estimate: sign * value,
            error_estimate: error,
        });
    }
    Ok(Quadrature {
        value: sign * value,
        error,
    })
}

/// Integral over `[a, ∞)` through the map `x = a + u / (1 - u)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    opts: QuadOptions,
) -> Result<Quadrature> {
    let g = |u: f64| {
        let om = 1.0 - u;
        let x = a + u / om;
        f(x) / (om * om)
    };
    integrate(g, 0.0, 1.0, opts)
}

/// Integral over the whole real line, split at `center`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    f: F,
    center: f64,
    opts: QuadOptions,
) -> Result<Quadrature> {
    let right = integrate_to_infinity(&f, center, opts)?;
    let left = integrate_to_infinity(|x| f(2.0 * center - x), center, opts)?;
    Ok(Quadrature {
        value: left.value + right.value,
        error: left.error + right.error,
    })
}

/// `∫_0^∞ g(t) dt` computed as `∫ g(e^y) e^y dy` over the real line, which
/// handles power-law behaviour at both ends.
pub fn integrate_positive_log<F: Fn(f64) -> f64>(
    g: F,
    center_log: f64,
    opts: QuadOptions,
) -> Result<Quadrature> {
    integrate_real_line(
        |y: f64| {
            let t = y.exp();
            if t == 0.0 || !t.is_finite() {
                0.0
            } else {
                g(t) * t
            }
        },
        center_log,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((q.value - 0.0).abs() < 1e-14);
        let q = integrate(|x| x.powi(6), -1.0, 1.0, QuadOptions::default()).unwrap();
        assert!((q.value - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let q = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, QuadOptions::tight()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-10, "{q:?}");
    }

    #[test]
    fn semi_infinite_and_log_map() {
        let q = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, QuadOptions::tight()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-13);
        // ∫ t^{-1/2} e^{-t} dt = √π
        let q = integrate_positive_log(|t: f64| t.powf(-0.5) * (-t).exp(), 0.0, QuadOptions::tight())
            .unwrap();
        assert!((q.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let q = integrate(|x: f64| x.cos(), 1.0, 0.0, QuadOptions::default()).unwrap();
        assert!((q.value + 1f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn reports_failure_when_budget_exhausted() {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-15,
            max_intervals: 3,
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, opts);
        assert!(matches!(r, Err(Error::QuadratureFailed { .. })));
    }
}
