use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;

use super::{once, par_draws, seeded, ClaimResult, Family, VerifyConfig};
use crate::couplings::{
    couple_gg_measure, couple_pd_bridge, couple_size_biased, couple_size_biased_unit,
    factorization_error, linear_grid, stable_gamma_draw, ScalarCoupler,
};
use crate::error::{invalid, Result};
use crate::excursions::{three_case_model, ExcursionCoupler, ExcursionSampler, ExcursionTriple, PathOracle};
use crate::measures::{crp_partition, diversity_estimate, pd_largest_weight, Truncation};
use crate::samplers::scalar::{gamma_draw, stable_draw, tilted_stable_draw};
use crate::samplers::sample_xi_h_pair;
use crate::special_fn::cumulant::{CumulantFamily, CumulantModel};
use crate::special_fn::stable::stable_density_quadrature;
use crate::special_fn::{
    beta_cdf, gamma_cdf, stable_density, LevyDensityModel, NumericInverseCdf,
    StableParams,
};
use crate::stats::{
    chi2_binned, independence_test, ks_one_sample, ks_two_sample, moment_ci,
    StatReport,
};

const PERMUTATIONS: usize = 499;
const N_LARGE: usize = 100_000;
const N_MEDIUM: usize = 10_000;
const N_DEP: usize = 2000;
const PD_MAX_STICKS: usize = 100_000_000;

fn gamma_ks(x: &[f64], shape: f64, level: f64) -> Result<StatReport> {
    ks_one_sample(x, |v| gamma_cdf(shape, v.max(0.0)).unwrap_or(0.0), level)
}

fn dep(x: &[f64], y: &[f64], seed: u64, level: f64) -> Result<StatReport> {
    let m = x.len().min(y.len()).min(N_DEP);
    independence_test(&x[..m], &y[..m], PERMUTATIONS, level, seed)
}

fn sizes(cfg: &VerifyConfig) -> (usize, usize) {
    let n = cfg.params.n.unwrap_or(N_LARGE);
    (n, n.min(N_MEDIUM))
}

fn half_or(cfg: &VerifyConfig) -> Result<StableParams> {
    StableParams::new(cfg.params.alpha.unwrap_or(0.5))
}

fn trunc(cfg: &VerifyConfig) -> Result<Truncation> {
    Truncation::new(cfg.truncation)
}

/// `τ_α(ζ) =d G_θ` for `ζ = G_{θ/α}`.
pub fn stable_gamma(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let p = half_or(cfg)?;
    let theta = cfg.params.theta.unwrap_or(1.0);
    let (n, _) = sizes(cfg);
    let checks = seeded(cfg, &[("tau(zeta) =d G_theta", true)], |seed| {
        let tau = par_draws(seed, "stable-gamma", n, |r| Ok(stable_gamma_draw(r, p, theta)?.tau))?;
        Ok(vec![gamma_ks(&tau, theta, cfg.level)?])
    })?;
    Ok(ClaimResult::finish(
        "stable-gamma",
        "stable-gamma algebra, generalized gamma subordinator at a gamma time",
        checks,
        start,
        30.0,
    ))
}

fn scalar_model(cfg: &VerifyConfig) -> Result<(CumulantModel, f64)> {
    let o = &cfg.params;
    let nu = o.nu.unwrap_or(1.0);
    if !(nu > 0.0) {
        return invalid("nu must be positive");
    }
    let model = match o.family.unwrap_or(Family::Gamma) {
        Family::Gamma => CumulantModel::gamma(o.a.unwrap_or(2.0))?,
        Family::Stable => CumulantModel::stable(half_or(cfg)?),
        Family::TiltedStable => CumulantModel::tilted_stable(half_or(cfg)?, o.b.unwrap_or(1.0))?,
        Family::SizeBiased => CumulantModel::size_biased(half_or(cfg)?, o.b.unwrap_or(1.0))?,
    };
    Ok((model, nu))
}

/// CDF of `T₀^{[ν]}`, closed form for the gamma family.
fn tilted_marginal_cdf(model: &CumulantModel, nu: f64) -> Result<Box<dyn Fn(f64) -> f64 + Sync>> {
    if let CumulantFamily::Gamma { a } = model.family() {
        let shape = a - nu;
        return Ok(Box::new(move |t| gamma_cdf(shape, t.max(0.0)).unwrap_or(0.0)));
    }
    let m = model.clone();
    let table = NumericInverseCdf::from_ln_density(move |t| {
        m.ln_density(t).unwrap_or(f64::NEG_INFINITY) - nu * t.ln()
    })?;
    Ok(Box::new(move |t| table.cdf(t)))
}

/// Scalar coupling: `T =d T₀^{[ν]}`, `ξT =d G_ν`, `T ⊥⊥ ξT`.
pub fn scalar_tilt(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let (model, nu) = scalar_model(cfg)?;
    let coupler = ScalarCoupler::new(model.clone(), nu)?;
    let t_cdf = tilted_marginal_cdf(&model, nu)?;
    let (n, _) = sizes(cfg);
    let names = [
        ("T =d T0^[nu]", true),
        ("xiT =d G_nu", true),
        ("T indep xiT", true),
    ];
    let checks = seeded(cfg, &names, |seed| {
        let d = par_draws(seed, "scalar-tilt", n, |r| coupler.sample(r))?;
        let t: Vec<f64> = d.iter().map(|c| c.t).collect();
        let xt: Vec<f64> = d.iter().map(|c| c.xi_t()).collect();
        Ok(vec![
            ks_one_sample(&t, &t_cdf, cfg.level)?,
            gamma_ks(&xt, nu, cfg.level)?,
            dep(&t, &xt, seed, cfg.level)?,
        ])
    })?;
    Ok(ClaimResult::finish(
        "scalar-tilt",
        "scalar coupling by conditional exponential tilting",
        checks,
        start,
        60.0,
    ))
}

/// Joint density of the Gamma(2), `ν = 1` coupling factorizes on `[0.1, 5]²`.
pub fn factorization(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let _ = cfg;
    let grid = linear_grid(0.1, 5.0, 50);
    let e = factorization_error(&CumulantModel::gamma(2.0)?, 1.0, &grid, &grid)?;
    let checks = vec![
        once(
            "joint density = G_nu density x T marginal x Jacobian",
            StatReport::numeric("", e.joint, 1e-6, e.points),
        ),
        once(
            "integrated joint density = T marginal",
            StatReport::numeric("", e.marginal, 1e-6, grid.len()),
        ),
    ];
    Ok(ClaimResult::finish(
        "factorization",
        "joint density factorization of the Gamma(2) coupling",
        checks,
        start,
        5.0,
    ))
}

/// Generalized-gamma measure coupling.
pub fn gg_measure(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let p = half_or(cfg)?;
    let b = cfg.params.b.unwrap_or(0.0);
    let nu = cfg.params.nu.unwrap_or(0.5);
    let tr = trunc(cfg)?;
    let (n, n_pd) = sizes(cfg);
    let names = [
        ("xiT =d G_nu", true),
        ("p1 =d PD(alpha, nu) p1", b == 0.0),
        ("p1 indep xiT", true),
        ("P[0,1/2] indep xiT", true),
    ];
    let checks = seeded(cfg, &names, |seed| {
        let d = par_draws(seed, "gg-measure", n, |r| {
            let c = couple_gg_measure(r, p, b, nu, tr)?;
            Ok((c.xi_t(), c.weights.p1(), c.half_mass()))
        })?;
        let xt: Vec<f64> = d.iter().map(|v| v.0).collect();
        let p1: Vec<f64> = d.iter().map(|v| v.1).collect();
        let half: Vec<f64> = d.iter().map(|v| v.2).collect();
        let oracle = par_draws(seed, "pd-oracle", n_pd, |r| {
            pd_largest_weight(r, p.alpha(), nu, PD_MAX_STICKS)
        })?;
        Ok(vec![
            gamma_ks(&xt, nu, cfg.level)?,
            ks_two_sample(&p1[..n_pd], &oracle, cfg.level)?,
            dep(&p1, &xt, seed, cfg.level)?,
            dep(&half, &xt, seed, cfg.level)?,
        ])
    })?;
    Ok(ClaimResult::finish(
        "gg-measure",
        "generalized-gamma measure coupling",
        checks,
        start,
        300.0,
    ))
}

/// Size-biased coupling and its `ν = 1` reduction.
pub fn size_biased(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let p = half_or(cfg)?;
    let b = cfg.params.b.unwrap_or(1.0);
    let nu = cfg.params.nu.unwrap_or(1.5);
    let tr = trunc(cfg)?;
    let (n, _) = sizes(cfg);
    let names = [
        ("xiT =d G_nu", true),
        ("nu = 1: T =d X_alpha,b", true),
        ("nu = 1, Z = (G_1 + b^alpha)^(1/alpha): (Z - b) T =d G_1", true),
    ];
    let checks = seeded(cfg, &names, |seed| {
        let xt = par_draws(seed, "size-biased", n, |r| Ok(couple_size_biased(r, p, b, nu, tr)?.xi_t()))?;
        let t1 = par_draws(seed, "size-biased-unit", n, |r| Ok(couple_size_biased(r, p, b, 1.0, tr)?.t))?;
        let x = par_draws(seed, "tilted-stable", n, |r| Ok(tilted_stable_draw(r, p.alpha(), b)))?;
        let z = par_draws(seed, "size-biased-z", n, |r| Ok(couple_size_biased_unit(r, p, b)?.xi_t()))?;
        Ok(vec![
            gamma_ks(&xt, nu, cfg.level)?,
            ks_two_sample(&t1, &x, cfg.level)?,
            gamma_ks(&z, 1.0, cfg.level)?,
        ])
    })?;
    Ok(ClaimResult::finish(
        "size-biased",
        "size-biased measure coupling",
        checks,
        start,
        180.0,
    ))
}

/// Full-range Poisson-Dirichlet bridge.
pub fn pd_bridge(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let p = half_or(cfg)?;
    let a = p.alpha();
    let theta_scale = cfg.params.theta.unwrap_or(-0.25);
    let theta_pd = cfg.params.theta.unwrap_or(0.5);
    let tr = trunc(cfg)?;
    let (n, n_pd) = sizes(cfg);
    let names = [
        ("xi_H T =d G_(theta+alpha)", true),
        ("bridge p1 =d PD(alpha, theta) p1", true),
        ("(xi_H + H) T =d G_(1+theta)", false),
        ("(xi_H + H) T =d G_(1-theta)", false),
    ];
    let checks = seeded(cfg, &names, |seed| {
        let xt = par_draws(seed, "pd-bridge-scale", n, |r| Ok(couple_pd_bridge(r, p, theta_scale, tr)?.xi_h_t()))?;
        let d = par_draws(seed, "pd-bridge", n_pd, |r| {
            let d = couple_pd_bridge(r, p, theta_pd, tr)?;
            Ok((d.weights.p1(), d.scaled_total()))
        })?;
        let p1: Vec<f64> = d.iter().map(|v| v.0).collect();
        let total: Vec<f64> = d.iter().map(|v| v.1).collect();
        let oracle = par_draws(seed, "pd-oracle", n_pd, |r| pd_largest_weight(r, a, theta_pd, PD_MAX_STICKS))?;
        let minus = if theta_pd < 1.0 {
            gamma_ks(&total, 1.0 - theta_pd, cfg.level)?
        } else {
            StatReport::numeric("", f64::INFINITY, 0.0, total.len()).with_note("1 - theta <= 0")
        };
        Ok(vec![
            gamma_ks(&xt, theta_scale + a, cfg.level)?,
            ks_two_sample(&p1, &oracle, cfg.level)?,
            gamma_ks(&total, 1.0 + theta_pd, cfg.level)?,
            minus,
        ])
    })?;
    Ok(ClaimResult::finish(
        "pd-bridge",
        "full-range Poisson-Dirichlet bridge",
        checks,
        start,
        300.0,
    ))
}

/// `(ξ_H + H)^α =d G_{(α+θ)/α}` and `ξ_H/(ξ_H + H) =d B_{θ+α, 1-α}`.
pub fn beta_gamma(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let p = half_or(cfg)?;
    let a = p.alpha();
    let theta = cfg.params.theta.unwrap_or(0.5);
    let (n, _) = sizes(cfg);
    let names = [
        ("(xi_H + H)^alpha =d G_((alpha+theta)/alpha)", true),
        ("xi_H / (xi_H + H) =d B_(theta+alpha, 1-alpha)", true),
    ];
    let checks = seeded(cfg, &names, |seed| {
        let d = par_draws(seed, "beta-gamma", n, |r| sample_xi_h_pair(r, p, theta))?;
        let s: Vec<f64> = d.iter().map(|(x, h)| (x + h).powf(a)).collect();
        let ratio: Vec<f64> = d.iter().map(|(x, h)| x / (x + h)).collect();
        Ok(vec![
            gamma_ks(&s, (a + theta) / a, cfg.level)?,
            ks_one_sample(&ratio, |v| beta_cdf(theta + a, 1.0 - a, v.clamp(0.0, 1.0)).unwrap_or(0.0), cfg.level)?,
        ])
    })?;
    Ok(ClaimResult::finish(
        "beta-gamma",
        "beta-gamma representation of the (xi_H, H) pair",
        checks,
        start,
        30.0,
    ))
}

/// Fixed KS distance bound for the finite-`n` diversity comparison.
pub const DIVERSITY_MAX_D: f64 = 0.05;
const DIVERSITY_CUSTOMERS: usize = 10_000;
const DIVERSITY_REPLICATES: usize = 500;
const DIVERSITY_REFERENCE: usize = 100_000;

/// `K_n / n^α` of PD(α, 0) CRP partitions against `S_α^{-α}`.
pub fn diversity(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let p = half_or(cfg)?;
    let a = p.alpha();
    let theta = cfg.params.theta.unwrap_or(0.0);
    let reps = cfg.params.n.unwrap_or(DIVERSITY_REPLICATES);
    let names = [("K_n / n^alpha vs S^-alpha, D < 0.05", true)];
    let checks = seeded(cfg, &names, |seed| {
        let k = par_draws(seed, "crp", reps, |r| {
            diversity_estimate(&crp_partition(r, a, theta, DIVERSITY_CUSTOMERS)?, a)
        })?;
        let s = par_draws(seed, "stable-reference", DIVERSITY_REFERENCE, |r| {
            Ok(stable_draw(r, a).powf(-a))
        })?;
        let mut rep = ks_two_sample(&k, &s, cfg.level)?;
        rep.threshold = DIVERSITY_MAX_D;
        rep.passed = rep.statistic < DIVERSITY_MAX_D;
        Ok(vec![rep.with_note(format!(
            "{reps} partitions of {DIVERSITY_CUSTOMERS}; fixed bound replaces the KS critical value"
        ))])
    })?;
    Ok(ClaimResult::finish(
        "diversity",
        "alpha-diversity of CRP partitions",
        checks,
        start,
        600.0,
    ))
}

fn column(v: &[ExcursionTriple], k: usize) -> Vec<f64> {
    v.iter()
        .map(|e| match k {
            0 => e.overshoot,
            1 => e.undershoot,
            _ => e.duration,
        })
        .collect()
}

/// Excursion coupling in the compound-Poisson case.
pub fn excursion(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let o = &cfg.params;
    let model = three_case_model(o.alpha.unwrap_or(0.5), o.nu.unwrap_or(1.5), o.b.unwrap_or(1.0))?;
    let coupler = ExcursionCoupler::new(model)?;
    let direct = ExcursionSampler::new(&model.levy()?)?;
    let untilted = ExcursionSampler::new(&model.untilted_levy()?)?;
    let oracle = PathOracle::new(&model.levy()?).ok();
    let has_oracle = oracle.is_some();
    let (n, n_cmp) = sizes(cfg);
    let names = [
        ("xi Delta =d G_nu", true),
        ("Delta =d Delta of the nu-untilted density", true),
        ("O: density sampler = path oracle", has_oracle),
        ("U: density sampler = path oracle", has_oracle),
        ("Delta: density sampler = path oracle", has_oracle),
        ("xi Delta indep Delta", true),
        ("xi Delta indep O", true),
        ("xi Delta indep U", true),
    ];
    let checks = seeded(cfg, &names, |seed| {
        let c = par_draws(seed, "excursion", n, |r| Ok(coupler.sample(r)))?;
        let xd: Vec<f64> = c.iter().map(|c| c.xi_delta()).collect();
        let triples: Vec<ExcursionTriple> = c.iter().map(|c| c.triple).collect();
        let u_ref = par_draws(seed, "excursion-untilted", n_cmp, |r| Ok(untilted.sample(r)))?;
        let d_ref = par_draws(seed, "excursion-direct", n_cmp, |r| Ok(direct.sample(r)))?;
        let mut out = vec![
            gamma_ks(&xd, model.nu, cfg.level)?,
            ks_two_sample(&column(&triples[..n_cmp], 2), &column(&u_ref, 2), cfg.level)?,
        ];
        match &oracle {
            Some(orc) => {
                let o_ref = par_draws(seed, "excursion-oracle", n_cmp, |r| Ok(orc.sample(r).0))?;
                for k in 0..3 {
                    out.push(ks_two_sample(&column(&d_ref, k), &column(&o_ref, k), cfg.level)?);
                }
            }
            None => {
                for _ in 0..3 {
                    out.push(
                        StatReport::numeric("", 0.0, 0.0, 0).with_note("no path oracle with infinite activity"),
                    );
                }
            }
        }
        for k in [2, 0, 1] {
            out.push(dep(&xd, &column(&triples, k), seed, cfg.level)?);
        }
        Ok(out)
    })?;
    Ok(ClaimResult::finish(
        "excursion",
        &format!("excursion coupling ({} case)", model.case.label()),
        checks,
        start,
        300.0,
    ))
}

/// Deterministic numeric kernels.
pub fn kernels(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let _ = cfg;
    let half = StableParams::new(0.5)?;
    let m = 200;
    let mut dens = 0.0f64;
    for i in 0..m {
        let t = 0.05 * (400.0f64).powf(i as f64 / (m - 1) as f64);
        let closed = stable_density(half, t)?;
        let quad = stable_density_quadrature(half, t)?.value;
        dens = dens.max(((quad - closed) / closed).abs());
    }
    let moment = CumulantModel::stable(half).neg_moment_quadrature(0.5)?;
    let mut psi = 0.0f64;
    for &(a, nu, b) in &[(0.75, 0.25, 0.0), (0.5, 0.5, 1.0), (0.5, 1.5, 1.0)] {
        let model = three_case_model(a, nu, b)?;
        let l: LevyDensityModel = model.levy()?;
        let closed = l.exponent(1.0)?;
        let quad = l.exponent_quadrature(1.0)?;
        psi = psi.max(((quad - closed) / closed).abs());
    }
    let checks = vec![
        once(
            "stable(1/2) density: quadrature vs closed form on [0.05, 20]",
            StatReport::numeric("", dens, 1e-8, m),
        ),
        once(
            "E[S_1/2^-1/2] by quadrature = 2/sqrt(pi)",
            StatReport::numeric("", (moment - 2.0 / PI.sqrt()).abs(), 1e-8, 1),
        ),
        once(
            "Psi_nu closed forms vs quadrature, all three cases",
            StatReport::numeric("", psi, 1e-6, 3),
        ),
    ];
    Ok(ClaimResult::finish(
        "kernels",
        "numeric kernels",
        checks,
        start,
        10.0,
    ))
}

const NULL_RUNS: usize = 200;
/// Upper end of the binomial 99% band for 200 runs at nominal 1%.
pub const NULL_MAX_RATE: f64 = 0.04;

fn null_rate<F>(seed: u64, label: &str, f: F) -> Result<StatReport>
where
    F: Fn(&mut crate::samplers::RngStream, u64) -> Result<bool> + Sync,
{
    let flags = par_draws(seed, label, NULL_RUNS, |r| {
        let s = r.random::<u64>();
        f(r, s)
    })?;
    let fails = flags.iter().filter(|pass| !**pass).count();
    let rate = fails as f64 / NULL_RUNS as f64;
    Ok(StatReport::numeric("", rate, NULL_MAX_RATE, NULL_RUNS).with_note(format!("{fails} rejections")))
}

/// False-positive rates of every test under a true null.
pub fn calibration(cfg: &VerifyConfig) -> Result<ClaimResult> {
    let start = Instant::now();
    let level = cfg.level;
    let names = [
        ("KS one-sample null rejection rate", true),
        ("KS two-sample null rejection rate", true),
        ("distance-correlation permutation null rejection rate", true),
        ("moment CI null rejection rate", true),
        ("chi-square null rejection rate", true),
    ];
    let checks = seeded(cfg, &names, |seed| {
        Ok(vec![
            null_rate(seed, "null-ks1", |r, _| {
                let x: Vec<f64> = (0..1000).map(|_| gamma_draw(r, 0.5)).collect();
                Ok(gamma_ks(&x, 0.5, level)?.passed)
            })?,
            null_rate(seed, "null-ks2", |r, _| {
                let x: Vec<f64> = (0..1000).map(|_| gamma_draw(r, 2.0)).collect();
                let y: Vec<f64> = (0..800).map(|_| gamma_draw(r, 2.0)).collect();
                Ok(ks_two_sample(&x, &y, level)?.passed)
            })?,
            null_rate(seed, "null-dcor", |r, s| {
                let x: Vec<f64> = (0..500).map(|_| gamma_draw(r, 1.0)).collect();
                let y: Vec<f64> = (0..500).map(|_| gamma_draw(r, 1.0)).collect();
                Ok(independence_test(&x, &y, 199, level, s)?.passed)
            })?,
            null_rate(seed, "null-moment", |r, _| {
                let x: Vec<f64> = (0..1000).map(|_| gamma_draw(r, 1.0)).collect();
                Ok(moment_ci(&x, 1.0, |v| v)?.passed)
            })?,
            null_rate(seed, "null-chi2", |r, _| {
                let mut counts = [0u64; 10];
                for _ in 0..1000 {
                    counts[r.random_range(0..10)] += 1;
                }
                Ok(chi2_binned(&counts, &[0.1; 10], level)?.passed)
            })?,
        ])
    })?;
    Ok(ClaimResult::finish(
        "calibration",
        "null calibration of the test engine",
        checks,
        start,
        300.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernels_and_factorization_pass() {
        let cfg = VerifyConfig::default();
        let k = kernels(&cfg).unwrap();
        assert!(k.checks.iter().all(|c| c.passed), "{:?}", k.checks);
        let f = factorization(&cfg).unwrap();
        assert!(f.checks.iter().all(|c| c.passed), "{:?}", f.checks);
    }

    #[test]
    fn small_scalar_tilt_run() {
        let cfg = VerifyConfig {
            params: super::super::Overrides {
                n: Some(3000),
                ..Default::default()
            },
            ..VerifyConfig::default()
        };
        let r = scalar_tilt(&cfg).unwrap();
        assert_eq!(r.checks.len(), 3);
        assert_eq!(r.checks[0].reports.len(), 3);
    }
}
