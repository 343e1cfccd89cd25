//! Goodness-of-fit, two-sample, independence and moment tests. Every test
//! returns a [`StatReport`] carrying the statistic, its threshold and the
//! verdict.

pub mod chi2;
pub mod dcor;
pub mod ks;
pub mod moments;

use serde::{Deserialize, Serialize};

pub use chi2::chi2_binned;
pub use dcor::{distance_correlation, independence_test, rank_dcov_v};
pub use ks::{ks_critical_value, ks_one_sample, ks_two_sample};
pub use moments::moment_ci;

/// Default significance level.
pub const LEVEL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    Ks1,
    Ks2,
    DistCorrPerm,
    MomentCi,
    Chi2Binned,
    /// Deterministic numeric comparison (relative error against a bound).
    Numeric,
}

impl TestKind {
    pub fn label(&self) -> &'static str {
        match self {
            TestKind::Ks1 => "KS1",
            TestKind::Ks2 => "KS2",
            TestKind::DistCorrPerm => "DistCorrPerm",
            TestKind::MomentCi => "MomentCI",
            TestKind::Chi2Binned => "Chi2Binned",
            TestKind::Numeric => "Numeric",
        }
    }
}

/// Outcome of one statistical or numeric check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub test: TestKind,
    /// Short description of what was tested; filled in by callers.
    pub claim: String,
    pub statistic: f64,
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub n: usize,
    pub seed: u64,
    pub passed: bool,
    pub notes: String,
}

impl StatReport {
    pub(crate) fn new(test: TestKind, statistic: f64, threshold: f64, n: usize) -> Self {
        Self {
            test,
            claim: String::new(),
            statistic,
            threshold,
            p_value: None,
            n,
            seed: 0,
            passed: statistic < threshold,
            notes: String::new(),
        }
    }

    /// A deterministic check `statistic <= threshold`.
    pub fn numeric(claim: impl Into<String>, statistic: f64, threshold: f64, n: usize) -> Self {
        Self {
            claim: claim.into(),
            passed: statistic <= threshold,
            ..Self::new(TestKind::Numeric, statistic, threshold, n)
        }
    }

    pub fn with_claim(mut self, claim: impl Into<String>) -> Self {
        self.claim = claim.into();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_note(mut self, note: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note.as_ref());
        self
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub const CSV_HEADER: &'static str = "claim,test,statistic,threshold,p_value,n,seed,verdict,notes";

    pub fn csv_row(&self) -> String {
        let p = self
            .p_value
            .map(|p| format!("{p:.16e}"))
            .unwrap_or_default();
        format!(
            "{},{},{:.16e},{:.16e},{},{},{},{},{}",
            csv_escape(&self.claim),
            self.test.label(),
            self.statistic,
            self.threshold,
            p,
            self.n,
            self.seed,
            self.verdict(),
            csv_escape(&self.notes)
        )
    }
}

pub(crate) fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Majority rule over seeded repetitions: at least two thirds must pass
/// (two of three for the usual three seeds).
pub fn majority_passes(reports: &[StatReport]) -> bool {
    if reports.is_empty() {
        return false;
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    3 * passed >= 2 * reports.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_rule() {
        let pass = StatReport::numeric("x", 0.0, 1.0, 1);
        let fail = StatReport::numeric("x", 2.0, 1.0, 1);
        assert!(majority_passes(&[pass.clone(), fail.clone(), pass.clone()]));
        assert!(!majority_passes(&[pass.clone(), fail.clone(), fail.clone()]));
        assert!(majority_passes(&[pass.clone()]));
        assert!(!majority_passes(&[]));
    }

    #[test]
    fn csv_row_escapes() {
        let r = StatReport::numeric("a, b", 0.5, 1.0, 3).with_note("x");
        let row = r.csv_row();
        assert!(row.starts_with("\"a, b\",Numeric,"));
        assert!(row.ends_with(",PASS,x"));
    }
}
