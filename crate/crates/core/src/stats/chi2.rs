use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{StatReport, TestKind};
use crate::error::{Error, Result};

/// Pearson chi-square test of observed counts against cell probabilities.
/// Adjacent cells are merged until each expected count is at least 5.
pub fn chi2_binned(observed: &[u64], probs: &[f64], level: f64) -> Result<StatReport> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::InvalidParameter(
            "chi-square needs matching observed/probability vectors of length >= 2".into(),
        ));
    }
    let psum: f64 = probs.iter().sum();
    if probs.iter().any(|p| !(*p >= 0.0)) || (psum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "cell probabilities must be nonnegative and sum to 1 (sum {psum})"
        )));
    }
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        o_acc += o as f64;
        e_acc += p * nf;
        if e_acc >= 5.0 {
            cells.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => cells.push((o_acc, e_acc)),
        }
    }
    if cells.len() < 2 {
        return Err(Error::SampleSize {
            got: n as usize,
            min: 10,
            max: usize::MAX,
        });
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let df = (cells.len() - 1) as f64;
    let dist = ChiSquared::new(df).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let threshold = dist.inverse_cdf(1.0 - level);
    let mut r = StatReport::new(TestKind::Chi2Binned, stat, threshold, n as usize);
    r.p_value = Some(dist.sf(stat));
    Ok(r.with_note(format!("{} cells", cells.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit_passes_and_gross_misfit_fails() {
        let r = chi2_binned(&[250, 250, 500], &[0.25, 0.25, 0.5], 0.01).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.passed);
        let r = chi2_binned(&[500, 250, 250], &[0.25, 0.25, 0.5], 0.01).unwrap();
        assert!(!r.passed);
        // df = 2 at 1%: 9.2103
        assert!((r.threshold - 9.210_340_371_976_18).abs() < 1e-6);
    }
}
