//! Reference values frozen from independent high-precision evaluations, and
//! cross-route checks between independently implemented samplers.

use std::f64::consts::PI;

use rand::Rng;
use tiltscale::couplings::{couple_gg_measure, couple_mixed_tilt, couple_scalar};
use tiltscale::excursions::{excursion_duration_density, three_case_model, ExcursionCase};
use tiltscale::measures::{
    crp_partition, normalize, pd_largest_weight, sample_gg_measure, sample_power_exp_measure,
    Truncation,
};
use tiltscale::special_fn::{gamma_cdf, stable_density, CumulantModel};
use tiltscale::stats::{chi2_binned, independence_test, ks_one_sample, ks_two_sample};
use tiltscale::{RngStream, StableParams};

fn half() -> StableParams {
    StableParams::new(0.5).unwrap()
}

#[test]
fn frozen_reference_values() {
    assert!((stable_density(half(), 4.0).unwrap() - 0.033_125_441_543_003_6).abs() < 1e-14);
    let gg = three_case_model(0.75, 0.25, 0.0).unwrap();
    assert!((gg.psi_nu(0.0).unwrap() - 0.733_305_800_585_193).abs() < 1e-12);
    let gp = three_case_model(0.5, 0.5, 1.0).unwrap();
    assert!((gp.psi_nu(1.0).unwrap() - 0.195_533_209_568_708).abs() < 1e-12);
    let d = excursion_duration_density(&gp.levy().unwrap(), 1.0).unwrap();
    assert!((d - 0.335_490_303_440_279).abs() < 1e-12, "{d}");
    let cp = three_case_model(0.5, 1.5, 1.0).unwrap();
    assert!((cp.psi_nu(1.0).unwrap() - 0.25 / PI.sqrt()).abs() < 1e-12);
    assert!((cp.jump_rate(1.0).unwrap() - 0.5 / PI.sqrt()).abs() < 1e-12);
    let m = CumulantModel::stable(half());
    assert!((m.neg_moment(0.5).unwrap() - 2.0 / PI.sqrt()).abs() < 1e-12);
}

#[test]
fn truncation_changes_total_mass_negligibly() {
    let n = 4000;
    let draw = |tol: f64, seed: u64| -> Vec<f64> {
        let tr = Truncation::new(tol).unwrap();
        let mut rng = RngStream::new(seed, 0);
        (0..n)
            .map(|_| sample_gg_measure(&mut rng, half(), 1.0, tr).unwrap().total_mass)
            .collect()
    };
    let coarse = draw(1e-3, 11);
    let fine = draw(1e-5, 12);
    let r = ks_two_sample(&coarse, &fine, 0.01).unwrap();
    assert!(r.passed, "{r:?}");
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    // E[X_{1/2,1}] = α b^{α-1} = 0.5.
    assert!((mean(&fine) - 0.5).abs() < 0.03, "{}", mean(&fine));
}

#[test]
fn three_customer_block_counts_are_exact() {
    let (a, t) = (0.4, 0.7);
    let den = (t + 1.0) * (t + 2.0);
    let p1 = (1.0 - a) * (2.0 - a) / den;
    let p3 = (t + a) * (t + 2.0 * a) / den;
    let probs = [p1, 1.0 - p1 - p3, p3];
    let mut rng = RngStream::new(21, 0);
    let mut counts = [0u64; 3];
    for _ in 0..30_000 {
        counts[crp_partition(&mut rng, a, t, 3).unwrap().k() - 1] += 1;
    }
    let r = chi2_binned(&counts, &probs, 0.01).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn scalar_and_measure_routes_agree_on_t() {
    let n = 5000;
    let nu = 0.5;
    let model = CumulantModel::stable(half());
    let mut rng = RngStream::new(31, 0);
    let scalar: Vec<f64> = (0..n)
        .map(|_| couple_scalar(&mut rng, &model, nu).unwrap().t)
        .collect();
    let tr = Truncation::new(1e-3).unwrap();
    let mut rng = RngStream::new(32, 0);
    let measure: Vec<f64> = (0..n)
        .map(|_| couple_gg_measure(&mut rng, half(), 0.0, nu, tr).unwrap().t)
        .collect();
    let r = ks_two_sample(&scalar, &measure, 0.01).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn random_tilt_mixture_keeps_gamma_product() {
    let n = 20_000;
    let nu = 0.8;
    let mut rng = RngStream::new(41, 0);
    let mut tilts = Vec::with_capacity(n);
    let draws: Vec<_> = (0..n)
        .map(|_| {
            couple_mixed_tilt(&mut rng, half(), nu, |r| {
                let b = 3.0 * r.random::<f64>();
                tilts.push(b);
                b
            })
            .unwrap()
        })
        .collect();
    let xt: Vec<f64> = draws.iter().map(|c| c.xi_t()).collect();
    let t: Vec<f64> = draws.iter().map(|c| c.t).collect();
    let r = ks_one_sample(&xt, |v| gamma_cdf(nu, v.max(0.0)).unwrap(), 0.01).unwrap();
    assert!(r.passed, "{r:?}");
    let r = independence_test(&xt[..2000], &tilts[..2000], 199, 0.01, 43).unwrap();
    assert!(r.passed, "{r:?}");
    let r = independence_test(&xt[..2000], &t[..2000], 199, 0.01, 44).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn gamma_process_weights_match_dirichlet_concentration() {
    let m = three_case_model(0.5, 0.5, 1.0).unwrap();
    assert_eq!(m.case, ExcursionCase::GammaProcess);
    let levy = m.levy().unwrap();
    let n = 4000;
    let tr = Truncation::new(1e-6).unwrap();
    let mut rng = RngStream::new(51, 0);
    let p1: Vec<f64> = (0..n)
        .map(|_| normalize(&sample_power_exp_measure(&mut rng, &levy, 1.0, tr).unwrap()).unwrap().p1())
        .collect();
    let candidates = [("kappa", m.kappa()), ("alpha", m.alpha), ("nu", m.nu), ("one", 1.0)];
    let mut best = ("", f64::INFINITY, false);
    for (i, (name, c)) in candidates.iter().enumerate() {
        let mut rng = RngStream::new(52 + i as u64, 0);
        let oracle: Vec<f64> = (0..n)
            .map(|_| pd_largest_weight(&mut rng, 0.0, *c, 100_000_000).unwrap())
            .collect();
        let r = ks_two_sample(&p1, &oracle, 0.01).unwrap();
        println!("PD(0, {name} = {c:.6}): D = {:.4}", r.statistic);
        if r.statistic < best.1 {
            best = (name, r.statistic, r.passed);
        }
    }
    assert_eq!(best.0, "kappa");
    assert!(best.2);
}
