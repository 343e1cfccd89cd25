//! Run configuration: a flat JSON file merged with command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use tiltscale::verify::{Family, Overrides, VerifyConfig, CLAIM_TRUNCATION};

use crate::CliError;

/// Flags shared by every subcommand. Each one overrides the same key of
/// the `--config` file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Exponential tilt.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Gamma shape for `--family gamma`.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated seeds, e.g. `1,2,3`.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Relative tolerance of infinite-activity jump truncation (default 1e-3).
    #[arg(long, allow_negative_numbers = true)]
    pub truncation: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat JSON object with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Test level.
    #[arg(long, allow_negative_numbers = true)]
    pub level: Option<f64>,
    /// gamma, stable, tilted-stable or size-biased.
    #[arg(long)]
    pub family: Option<Family>,
    /// Number of ranked weights written per pd-bridge row.
    #[arg(long)]
    pub k: Option<usize>,
    /// Partitions per seed for `diversity`.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Stop each check once its majority verdict is settled.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub nu: Option<f64>,
    pub b: Option<f64>,
    pub a: Option<f64>,
    pub n: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub truncation: Option<f64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub level: Option<f64>,
    pub family: Option<Family>,
    pub k: Option<usize>,
    pub replicates: Option<usize>,
    pub quick: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Fully merged settings. Parameters left unset keep the per-command defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub nu: Option<f64>,
    pub b: Option<f64>,
    pub a: Option<f64>,
    pub n: Option<usize>,
    pub seeds: Vec<u64>,
    pub truncation: Option<f64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub level: f64,
    pub family: Option<Family>,
    pub k: Option<usize>,
    pub replicates: Option<usize>,
    pub quick: bool,
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let cfg = Self {
            alpha: flags.alpha.or(file.alpha),
            theta: flags.theta.or(file.theta),
            nu: flags.nu.or(file.nu),
            b: flags.b.or(file.b),
            a: flags.a.or(file.a),
            n: flags.n.or(file.n),
            seeds: flags.seeds.clone().or(file.seeds).unwrap_or_else(|| vec![1, 2, 3]),
            truncation: flags.truncation.or(file.truncation),
            out: flags.out.clone().or(file.out),
            workers: flags.workers.or(file.workers),
            level: flags.level.or(file.level).unwrap_or(tiltscale::stats::LEVEL),
            family: flags.family.or(file.family),
            k: flags.k.or(file.k),
            replicates: flags.replicates.or(file.replicates),
            quick: flags.quick || file.quick.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return usage(format!("alpha must lie in (0, 1), got {a}"));
            }
        }
        if let Some(nu) = self.nu {
            if !(nu > 0.0 && nu.is_finite()) {
                return usage("nu must be positive");
            }
        }
        if let Some(b) = self.b {
            if !(b >= 0.0 && b.is_finite()) {
                return usage("b must be finite and nonnegative");
            }
        }
        if let Some(a) = self.a {
            if !(a > 0.0 && a.is_finite()) {
                return usage("a must be positive");
            }
        }
        if let Some(t) = self.theta {
            let alpha = self.alpha.unwrap_or(0.5);
            if !(t > -alpha && t.is_finite()) {
                return usage(format!("theta must exceed -alpha = {}, got {t}", -alpha));
            }
        }
        if self.n == Some(0) {
            return usage("n must be positive");
        }
        if self.seeds.is_empty() {
            return usage("at least one seed is required");
        }
        if let Some(t) = self.truncation {
            if !(t > 0.0 && t < 1.0) {
                return usage(format!("truncation must lie in (0, 1), got {t}"));
            }
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return usage(format!("level must lie in (0, 1), got {}", self.level));
        }
        if self.workers == Some(0) {
            return usage("workers must be positive");
        }
        if self.k == Some(0) {
            return usage("k must be positive");
        }
        if self.replicates == Some(0) {
            return usage("replicates must be positive");
        }
        Ok(())
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            seeds: self.seeds.clone(),
            quick: self.quick,
            level: self.level,
            truncation: self.truncation.unwrap_or(CLAIM_TRUNCATION),
            params: Overrides {
                alpha: self.alpha,
                theta: self.theta,
                nu: self.nu,
                b: self.b,
                a: self.a,
                n: self.n,
                family: self.family,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<FileConfig>(r#"{"alhpa": 0.5}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
        let ok: FileConfig = serde_json::from_str(r#"{"alpha": 0.5, "family": "tilted-stable"}"#).unwrap();
        assert_eq!(ok.family, Some(Family::TiltedStable));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"alpha": 0.3, "nu": 2.0, "seeds": [7]}"#).unwrap();
        let flags = Flags {
            alpha: Some(0.6),
            config: Some(path),
            ..Flags::default()
        };
        let cfg = RunConfig::resolve(&flags).unwrap();
        assert_eq!(cfg.alpha, Some(0.6));
        assert_eq!(cfg.nu, Some(2.0));
        assert_eq!(cfg.seeds, vec![7]);
    }

    #[test]
    fn nonpositive_nu_is_a_usage_error() {
        let flags = Flags {
            nu: Some(0.0),
            ..Flags::default()
        };
        match RunConfig::resolve(&flags) {
            Err(CliError::Usage(m)) => assert_eq!(m, "nu must be positive"),
            other => panic!("{other:?}"),
        }
    }
}
