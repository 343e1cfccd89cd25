use super::{StatReport, TestKind};
use crate::error::{Error, Result};

/// Checks `|mean(f(x)) - target| <= 3 · stderr`. Nothing is trimmed; the
/// excess kurtosis of `f(x)` is reported in the notes so heavy tails are
/// visible. Zero variance requires exact equality.
pub fn moment_ci<F: Fn(f64) -> f64>(x: &[f64], target: f64, moment_fn: F) -> Result<StatReport> {
    let n = x.len();
    if n < 2 {
        return Err(Error::SampleSize {
            got: n,
            min: 2,
            max: usize::MAX,
        });
    }
    let v: Vec<f64> = x.iter().map(|&t| moment_fn(t)).collect();
    if let Some(bad) = v.iter().find(|u| !u.is_finite()) {
        return Err(Error::DegenerateVariance(format!("moment function produced {bad}")));
    }
    let nf = n as f64;
    let mean = v.iter().sum::<f64>() / nf;
    let m2 = v.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / nf;
    let m4 = v.iter().map(|u| (u - mean).powi(4)).sum::<f64>() / nf;
    let var = m2 * nf / (nf - 1.0);
    if !var.is_finite() {
        return Err(Error::DegenerateVariance(format!("variance is {var}")));
    }
    let dev = (mean - target).abs();
    if var == 0.0 {
        let mut r = StatReport::new(TestKind::MomentCi, dev, 0.0, n);
        r.passed = dev == 0.0;
        return Ok(r.with_note("zero variance"));
    }
    let se = (var / nf).sqrt();
    let mut r = StatReport::new(TestKind::MomentCi, dev, 3.0 * se, n);
    r.passed = dev <= 3.0 * se;
    let kurt = m4 / (m2 * m2) - 3.0;
    Ok(r.with_note(format!("mean={mean:.6e}, stderr={se:.3e}, excess_kurtosis={kurt:.3}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample() {
        let x = vec![2.5; 10];
        assert!(moment_ci(&x, 2.5, |t| t).unwrap().passed);
        assert!(!moment_ci(&x, 2.4, |t| t).unwrap().passed);
    }

    #[test]
    fn non_finite_is_degenerate() {
        let x = vec![0.0, 1.0];
        assert!(matches!(
            moment_ci(&x, 0.0, |t| 1.0 / t),
            Err(Error::DegenerateVariance(_))
        ));
    }
}
