use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use tiltscale::couplings::{couple_gg_measure, couple_pd_bridge, couple_size_biased, ScalarCoupler};
use tiltscale::excursions::{three_case_model, ExcursionCoupler};
use tiltscale::io;
use tiltscale::measures::{crp_partition, diversity_estimate, sample_gg_measure, Truncation};
use tiltscale::special_fn::CumulantModel;
use tiltscale::verify::{par_draws, run_all, run_claim, ClaimResult, Family, CLAIM_TRUNCATION};
use tiltscale::{RngStream, StableParams};

use crate::config::RunConfig;
use crate::{CliError, Outcome};

const DEFAULT_N: usize = 10_000;

fn output(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn stable(cfg: &RunConfig) -> Result<StableParams, CliError> {
    Ok(StableParams::new(cfg.alpha.unwrap_or(0.5))?)
}

fn truncation(cfg: &RunConfig) -> Result<Truncation, CliError> {
    Ok(Truncation::new(cfg.truncation.unwrap_or(CLAIM_TRUNCATION))?)
}

fn scalar_model(cfg: &RunConfig) -> Result<CumulantModel, CliError> {
    let b = cfg.b.unwrap_or(1.0);
    Ok(match cfg.family.unwrap_or(Family::Gamma) {
        Family::Gamma => CumulantModel::gamma(cfg.a.unwrap_or(2.0))?,
        Family::Stable => CumulantModel::stable(stable(cfg)?),
        Family::TiltedStable => CumulantModel::tilted_stable(stable(cfg)?, b)?,
        Family::SizeBiased => CumulantModel::size_biased(stable(cfg)?, b)?,
    })
}

/// Writes `header` once, then the rows of every seed in order.
fn write_rows<F>(cfg: &RunConfig, header: &str, rows: F) -> Result<Outcome, CliError>
where
    F: Fn(u64) -> Result<Vec<String>, CliError>,
{
    let mut w = output(cfg)?;
    writeln!(w, "{header}")?;
    for &seed in &cfg.seeds {
        for r in rows(seed)? {
            writeln!(w, "{r}")?;
        }
    }
    w.flush()?;
    Ok(Outcome::Pass)
}

pub fn sample(kind: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n.unwrap_or(DEFAULT_N);
    match kind {
        "scalar" => {
            let coupler = ScalarCoupler::new(scalar_model(cfg)?, cfg.nu.unwrap_or(1.0))?;
            write_rows(cfg, io::SCALAR_HEADER, |seed| {
                let d = par_draws(seed, "sample-scalar", n, |r| coupler.sample(r))?;
                Ok(d.iter().map(|c| io::scalar_row(c, seed)).collect())
            })
        }
        "gg-measure" => {
            let (p, tr) = (stable(cfg)?, truncation(cfg)?);
            let (b, nu) = (cfg.b.unwrap_or(0.0), cfg.nu.unwrap_or(0.5));
            write_rows(cfg, io::MEASURE_HEADER, |seed| {
                Ok(par_draws(seed, "sample-gg-measure", n, |r| {
                    Ok(io::measure_row(&couple_gg_measure(r, p, b, nu, tr)?, seed))
                })?)
            })
        }
        "size-biased" => {
            let (p, tr) = (stable(cfg)?, truncation(cfg)?);
            let (b, nu) = (cfg.b.unwrap_or(1.0), cfg.nu.unwrap_or(1.5));
            write_rows(cfg, io::MEASURE_HEADER, |seed| {
                Ok(par_draws(seed, "sample-size-biased", n, |r| {
                    Ok(io::measure_row(&couple_size_biased(r, p, b, nu, tr)?, seed))
                })?)
            })
        }
        "pd-bridge" => {
            let (p, tr) = (stable(cfg)?, truncation(cfg)?);
            let theta = cfg.theta.unwrap_or(-0.25);
            let k = cfg.k.unwrap_or(10);
            write_rows(cfg, &io::pd_bridge_header(k), |seed| {
                Ok(par_draws(seed, "sample-pd-bridge", n, |r| {
                    Ok(io::pd_bridge_row(&couple_pd_bridge(r, p, theta, tr)?, k))
                })?)
            })
        }
        "jumps" => {
            let (p, tr) = (stable(cfg)?, truncation(cfg)?);
            let b = cfg.b.unwrap_or(0.0);
            let mut w = output(cfg)?;
            for (i, &seed) in cfg.seeds.iter().enumerate() {
                let m = sample_gg_measure(&mut RngStream::for_task(seed, "sample-jumps", 0), p, b, tr)?;
                let mut buf = Vec::new();
                io::write_jump_measure(&mut buf, &m, seed)?;
                let text = String::from_utf8_lossy(&buf);
                let body = if i == 0 { &text[..] } else { text.split_once('\n').map_or("", |s| s.1) };
                w.write_all(body.as_bytes())?;
            }
            w.flush()?;
            Ok(Outcome::Pass)
        }
        _ => Err(CliError::Usage(format!(
            "unknown sample kind '{kind}' (expected scalar, gg-measure, size-biased, pd-bridge or jumps)"
        ))),
    }
}

pub fn excursion(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = three_case_model(cfg.alpha.unwrap_or(0.5), cfg.nu.unwrap_or(1.5), cfg.b.unwrap_or(1.0))?;
    let coupler = ExcursionCoupler::new(model)?;
    let n = cfg.n.unwrap_or(DEFAULT_N);
    write_rows(cfg, io::EXCURSION_HEADER, |seed| {
        let d = par_draws(seed, "sample-excursion", n, |r| Ok(coupler.sample(r)))?;
        Ok(d.iter().map(|c| io::excursion_row(c, seed)).collect())
    })
}

pub fn diversity(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let alpha = cfg.alpha.unwrap_or(0.5);
    let theta = cfg.theta.unwrap_or(0.0);
    let customers = cfg.n.unwrap_or(DEFAULT_N);
    let reps = cfg.replicates.unwrap_or(500);
    write_rows(cfg, "replicate,customers,blocks,diversity,seed", |seed| {
        let d = par_draws(seed, "sample-diversity", reps, |r| {
            let part = crp_partition(r, alpha, theta, customers)?;
            Ok((part.k(), diversity_estimate(&part, alpha)?))
        })?;
        Ok(d.iter()
            .enumerate()
            .map(|(i, (k, div))| format!("{i},{customers},{k},{},{seed}", io::fmt_f64(*div)))
            .collect())
    })
}

fn print_results(results: &[ClaimResult]) -> Outcome {
    let mut out = std::io::stdout().lock();
    for r in results {
        // A closed stdout (e.g. piped into `head`) must not change the verdict.
        let _ = writeln!(out, "{}", r.summary_line());
        for line in r.check_lines() {
            let _ = writeln!(out, "    {line}");
        }
    }
    if results.iter().all(|r| r.passed) {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

pub fn verify(claim: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let vc = cfg.verify_config();
    let results = if claim == "all" {
        run_all(&vc)?
    } else {
        vec![run_claim(claim, &vc)?]
    };
    if let Some(path) = &cfg.out {
        let mut w = output(cfg)?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::to_writer_pretty(&mut w, &results).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w)?;
        } else {
            let reports: Vec<_> = results.iter().flat_map(|r| r.reports().cloned()).collect();
            io::write_reports(&mut w, &reports)?;
        }
        w.flush()?;
    }
    Ok(print_results(&results))
}

pub fn report(path: &Path) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let results: Vec<ClaimResult> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: not a JSON report written by verify ({e})", path.display())))?;
    Ok(print_results(&results))
}
