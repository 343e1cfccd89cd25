//! Kolmogorov-Smirnov tests with the asymptotic critical value
//! `c(level) = sqrt(-ln(level/2) / 2)` (1.6276 at the 1% level).

use super::{StatReport, TestKind};
use crate::error::{Error, Result};

pub const KS_MIN_N: usize = 50;

pub fn ks_critical_value(level: f64) -> f64 {
    (-0.5 * (0.5 * level).ln()).sqrt()
}

/// Asymptotic Kolmogorov survival function `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("level must lie in (0, 1), got {level}")));
    }
    Ok(())
}

fn sorted_finite(x: &[f64]) -> Result<Vec<f64>> {
    if let Some(v) = x.iter().find(|v| v.is_nan()) {
        return Err(Error::InvalidParameter(format!("sample contains {v}")));
    }
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample test of `x` against the continuous CDF `cdf`. The CDF is
/// checked for monotonicity and range on the sorted sample.
pub fn ks_one_sample<F: Fn(f64) -> f64>(x: &[f64], cdf: F, level: f64) -> Result<StatReport> {
    check_level(level)?;
    let n = x.len();
    if n < KS_MIN_N {
        return Err(Error::SampleSize {
            got: n,
            min: KS_MIN_N,
            max: usize::MAX,
        });
    }
    let v = sorted_finite(x)?;
    let nf = n as f64;
    let mut d: f64 = 0.0;
    let mut prev = f64::NEG_INFINITY;
    for (i, &xi) in v.iter().enumerate() {
        let f = cdf(xi);
        if !(-1e-12..=1.0 + 1e-12).contains(&f) || f + 1e-12 < prev {
            return Err(Error::NonMonotoneCdf { at: xi });
        }
        prev = prev.max(f);
        let lo = i as f64 / nf;
        let hi = (i + 1) as f64 / nf;
        d = d.max(hi - f).max(f - lo);
    }
    let threshold = ks_critical_value(level) / nf.sqrt();
    let mut r = StatReport::new(TestKind::Ks1, d, threshold, n);
    r.p_value = Some(kolmogorov_sf(nf.sqrt() * d));
    Ok(r)
}

/// Two-sample test; ties are processed together.
pub fn ks_two_sample(x: &[f64], y: &[f64], level: f64) -> Result<StatReport> {
    check_level(level)?;
    let (n, m) = (x.len(), y.len());
    if n < KS_MIN_N || m < KS_MIN_N {
        return Err(Error::SampleSize {
            got: n.min(m),
            min: KS_MIN_N,
            max: usize::MAX,
        });
    }
    let a = sorted_finite(x)?;
    let b = sorted_finite(y)?;
    let (nf, mf) = (n as f64, m as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let t = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < n && a[i] <= t {
            i += 1;
        }
        while j < m && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / nf - j as f64 / mf).abs());
    }
    let scale = ((nf + mf) / (nf * mf)).sqrt();
    let threshold = ks_critical_value(level) * scale;
    let mut r = StatReport::new(TestKind::Ks2, d, threshold, n.min(m));
    r.p_value = Some(kolmogorov_sf(d / scale));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_value_at_one_percent() {
        assert!((ks_critical_value(0.01) - 1.627_6).abs() < 1e-4);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn exact_statistic_small_case() {
        let x: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let r = ks_one_sample(&x, |t| t.clamp(0.0, 1.0), 0.01).unwrap();
        assert!((r.statistic - 0.005).abs() < 1e-12);
        assert!(r.passed);
    }

    #[test]
    fn size_and_monotonicity_errors() {
        let x: Vec<f64> = (0..49).map(|i| i as f64).collect();
        assert!(matches!(
            ks_one_sample(&x, |t| t, 0.01),
            Err(Error::SampleSize { got: 49, .. })
        ));
        let x: Vec<f64> = (0..60).map(|i| i as f64 / 60.0).collect();
        assert!(matches!(
            ks_one_sample(&x, |t| 1.0 - t, 0.01),
            Err(Error::NonMonotoneCdf { .. })
        ));
        assert!(ks_two_sample(&x, &x[..10], 0.01).is_err());
    }

    #[test]
    fn two_sample_identical_and_shifted() {
        let x: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let r = ks_two_sample(&x, &x, 0.01).unwrap();
        assert_eq!(r.statistic, 0.0);
        let y: Vec<f64> = x.iter().map(|v| v + 100.0).collect();
        let r = ks_two_sample(&x, &y, 0.01).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-12);
        assert!(!r.passed);
    }
}
