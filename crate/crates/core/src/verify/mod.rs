//! Named claims, each a bundle of statistical or numeric checks run over
//! a list of seeds. A statistical check passes when at least two thirds of
//! its seeded runs pass; a claim passes when every gating check passes and
//! it finished within its time budget.

mod claims;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::samplers::RngStream;
use crate::stats::{StatReport, LEVEL};

pub use claims::{
    beta_gamma, calibration, diversity, excursion, factorization, gg_measure, kernels,
    pd_bridge, size_biased, stable_gamma, scalar_tilt,
};

/// Truncation used by the measure-based claims.
pub const CLAIM_TRUNCATION: f64 = 1e-3;

/// Base family for the scalar coupling claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gamma,
    Stable,
    TiltedStable,
    SizeBiased,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(Family::Gamma),
            "stable" => Ok(Family::Stable),
            "tilted-stable" => Ok(Family::TiltedStable),
            "size-biased" => Ok(Family::SizeBiased),
            _ => invalid(format!(
                "unknown family '{s}' (expected gamma, stable, tilted-stable or size-biased)"
            )),
        }
    }
}

/// Parameter overrides; `None` keeps each claim's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub nu: Option<f64>,
    pub b: Option<f64>,
    pub a: Option<f64>,
    pub n: Option<usize>,
    pub family: Option<Family>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seeds: Vec<u64>,
    /// Stop a check once its majority verdict is settled.
    pub quick: bool,
    pub level: f64,
    pub truncation: f64,
    pub params: Overrides,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seeds: vec![1, 2, 3],
            quick: false,
            level: LEVEL,
            truncation: CLAIM_TRUNCATION,
            params: Overrides::default(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return invalid("at least one seed is required");
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return invalid(format!("level must lie in (0, 1), got {}", self.level));
        }
        if !(self.truncation > 0.0 && self.truncation < 1.0) {
            return invalid(format!("truncation must lie in (0, 1), got {}", self.truncation));
        }
        if self.params.n == Some(0) {
            return invalid("n must be positive");
        }
        Ok(())
    }
}

/// Verdict of one check over all seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Informational checks are reported but do not decide the claim.
    pub gating: bool,
    pub reports: Vec<StatReport>,
    pub passed: bool,
}

impl CheckResult {
    pub fn seeds_passed(&self) -> usize {
        self.reports.iter().filter(|r| r.passed).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub key: String,
    pub title: String,
    pub checks: Vec<CheckResult>,
    pub elapsed_secs: f64,
    pub limit_secs: f64,
    pub passed: bool,
}

impl ClaimResult {
    fn finish(key: &str, title: &str, checks: Vec<CheckResult>, start: Instant, limit_secs: f64) -> Self {
        let elapsed_secs = start.elapsed().as_secs_f64();
        let passed = checks.iter().filter(|c| c.gating).all(|c| c.passed) && elapsed_secs <= limit_secs;
        Self {
            key: key.to_string(),
            title: title.to_string(),
            checks,
            elapsed_secs,
            limit_secs,
            passed,
        }
    }

    /// One line per check, e.g. `gg-measure / xiT =d G_nu: PASS (3/3 seeds)`.
    pub fn check_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let tag = match (c.gating, c.passed) {
                    (true, true) => "PASS",
                    (true, false) => "FAIL",
                    (false, true) => "INFO pass",
                    (false, false) => "INFO fail",
                };
                format!(
                    "{} / {}: {tag} ({}/{} runs)",
                    self.key,
                    c.name,
                    c.seeds_passed(),
                    c.reports.len()
                )
            })
            .collect()
    }

    /// Single summary line for the claim.
    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {}: {} ({:.1} s, limit {:.0} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.key,
            self.title,
            self.elapsed_secs,
            self.limit_secs
        )
    }

    pub fn reports(&self) -> impl Iterator<Item = &StatReport> {
        self.checks.iter().flat_map(|c| c.reports.iter())
    }
}

/// Keys of all claims, in acceptance order.
pub const CLAIM_KEYS: [&str; 11] = [
    "stable-gamma",
    "scalar-tilt",
    "factorization",
    "gg-measure",
    "size-biased",
    "pd-bridge",
    "beta-gamma",
    "diversity",
    "excursion",
    "kernels",
    "calibration",
];

pub fn run_claim(key: &str, cfg: &VerifyConfig) -> Result<ClaimResult> {
    cfg.validate()?;
    match key {
        "stable-gamma" => stable_gamma(cfg),
        "scalar-tilt" | "thm1" => scalar_tilt(cfg),
        "factorization" => factorization(cfg),
        "gg-measure" => gg_measure(cfg),
        "size-biased" => size_biased(cfg),
        "pd-bridge" => pd_bridge(cfg),
        "beta-gamma" => beta_gamma(cfg),
        "diversity" => diversity(cfg),
        "excursion" => excursion(cfg),
        "kernels" => kernels(cfg),
        "calibration" => calibration(cfg),
        _ => invalid(format!(
            "unknown claim '{key}' (expected one of: all, {})",
            CLAIM_KEYS.join(", ")
        )),
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<ClaimResult>> {
    CLAIM_KEYS.iter().map(|k| run_claim(k, cfg)).collect()
}

/// Runs `f` once per seed and collects report `k` of every run into check
/// `k`. In quick mode, seeds stop once every verdict is settled.
pub(crate) fn seeded<F>(cfg: &VerifyConfig, names: &[(&str, bool)], f: F) -> Result<Vec<CheckResult>>
where
    F: Fn(u64) -> Result<Vec<StatReport>>,
{
    let total = cfg.seeds.len();
    let mut per: Vec<Vec<StatReport>> = vec![Vec::new(); names.len()];
    for &seed in &cfg.seeds {
        if cfg.quick && per.iter().all(|r| settled(r, total)) && !per[0].is_empty() {
            break;
        }
        let reps = f(seed)?;
        assert_eq!(reps.len(), names.len(), "one report per named check");
        for (k, r) in reps.into_iter().enumerate() {
            per[k].push(r.with_claim(names[k].0).with_seed(seed));
        }
    }
    Ok(names
        .iter()
        .zip(per)
        .map(|(&(name, gating), reports)| {
            let passes = reports.iter().filter(|r| r.passed).count();
            CheckResult {
                name: name.to_string(),
                gating,
                passed: 3 * passes >= 2 * total,
                reports,
            }
        })
        .collect())
}

fn settled(reports: &[StatReport], total: usize) -> bool {
    let passes = reports.iter().filter(|r| r.passed).count();
    let fails = reports.len() - passes;
    3 * passes >= 2 * total || 3 * (total - fails) < 2 * total
}

/// A deterministic check, run once.
pub(crate) fn once(name: &str, report: StatReport) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        gating: true,
        passed: report.passed,
        reports: vec![report.with_claim(name)],
    }
}

const CHUNK: usize = 1000;

/// `n` draws of `f`, generated in chunks of 1000 with one stream per chunk
/// (`RngStream::for_task(seed, label, chunk)`), so the result does not
/// depend on the number of worker threads.
pub fn par_draws<T, F>(seed: u64, label: &str, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::for_task(seed, label, c as u64);
            let m = CHUNK.min(n - c * CHUNK);
            (0..m).map(|_| f(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::TestKind;
    use rand::Rng;

    fn report(passed: bool) -> StatReport {
        let mut r = StatReport::numeric("x", 0.0, 1.0, 1);
        r.passed = passed;
        r
    }

    #[test]
    fn majority_and_early_stop() {
        let mut cfg = VerifyConfig {
            quick: true,
            ..VerifyConfig::default()
        };
        let calls = std::cell::Cell::new(0);
        let r = seeded(&cfg, &[("a", true)], |_| {
            calls.set(calls.get() + 1);
            Ok(vec![report(true)])
        })
        .unwrap();
        assert!(r[0].passed);
        assert_eq!(calls.get(), 2);
        cfg.quick = false;
        let r = seeded(&cfg, &[("a", true)], |s| Ok(vec![report(s != 2)])).unwrap();
        assert!(r[0].passed);
        assert_eq!(r[0].reports.len(), 3);
        let r = seeded(&cfg, &[("a", true)], |s| Ok(vec![report(s == 2)])).unwrap();
        assert!(!r[0].passed);
        assert_eq!(r[0].reports[0].test, TestKind::Numeric);
    }

    #[test]
    fn draws_do_not_depend_on_pool_size() {
        let f = |r: &mut RngStream| Ok(r.random::<u64>());
        let a = par_draws(5, "t", 2500, f).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| par_draws(5, "t", 2500, f).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.len(), 2500);
    }

    #[test]
    fn unknown_claim_and_bad_config() {
        let cfg = VerifyConfig::default();
        assert!(run_claim("nope", &cfg).is_err());
        let bad = VerifyConfig {
            seeds: vec![],
            ..VerifyConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("size-biased".parse::<Family>().unwrap(), Family::SizeBiased);
    }
}
