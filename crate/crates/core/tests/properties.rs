//! Property tests for invariants that must hold for every input.

use proptest::prelude::*;
use tiltscale::excursions::{three_case_model, ExcursionSampler};
use tiltscale::measures::{crp_partition, normalize, sample_gg_measure, Jump, JumpMeasure, Truncation};
use tiltscale::stats::{distance_correlation, independence_test, ks_two_sample};
use tiltscale::{RngStream, StableParams};

fn measure_from(sizes: &[f64], tail: f64) -> JumpMeasure {
    let jumps: Vec<Jump> = sizes
        .iter()
        .enumerate()
        .map(|(i, &size)| Jump {
            size,
            atom: i as f64 / sizes.len() as f64,
        })
        .collect();
    JumpMeasure {
        total_mass: sizes.iter().sum(),
        jumps,
        fixed_atoms: Vec::new(),
        tail_bound: tail,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalized_weights_are_ranked_and_sum_to_one(
        sizes in prop::collection::vec(1e-6f64..10.0, 1..200),
        tail in 0.0f64..1.0,
    ) {
        let w = normalize(&measure_from(&sizes, tail)).unwrap();
        prop_assert_eq!(w.len(), sizes.len());
        prop_assert!(w.p.windows(2).all(|p| p[0] >= p[1]));
        let total: f64 = w.p.iter().sum::<f64>() + w.deficit;
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_of_two_scaling_leaves_weights_unchanged(
        sizes in prop::collection::vec(1e-6f64..10.0, 1..100),
        tail in 0.0f64..1.0,
        k in -20i32..20,
    ) {
        let m = measure_from(&sizes, tail);
        let a = normalize(&m).unwrap();
        let b = normalize(&m.scaled(2f64.powi(k))).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn same_seed_same_measure(seed in any::<u64>(), b in 0.0f64..3.0) {
        let p = StableParams::new(0.5).unwrap();
        let tr = Truncation::new(1e-2).unwrap();
        let x = sample_gg_measure(&mut RngStream::new(seed, 7), p, b, tr).unwrap();
        let y = sample_gg_measure(&mut RngStream::new(seed, 7), p, b, tr).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn crp_blocks_partition_customers(
        seed in any::<u64>(),
        alpha in 0.0f64..0.95,
        theta_shift in 0.01f64..5.0,
        n in 1usize..500,
    ) {
        let p = crp_partition(&mut RngStream::new(seed, 0), alpha, theta_shift - alpha, n).unwrap();
        prop_assert_eq!(p.block_sizes.iter().sum::<usize>(), n);
        prop_assert!(p.block_sizes.iter().all(|&c| c > 0));
        prop_assert!(p.k() <= n);
    }

    #[test]
    fn duration_is_overshoot_plus_undershoot(seed in any::<u64>()) {
        let m = three_case_model(0.5, 1.5, 1.0).unwrap();
        let s = ExcursionSampler::new(&m.levy().unwrap()).unwrap();
        let mut rng = RngStream::new(seed, 0);
        for _ in 0..20 {
            let e = s.sample(&mut rng);
            prop_assert_eq!(e.duration, e.overshoot + e.undershoot);
            prop_assert!(e.overshoot > 0.0 && e.undershoot >= 0.0);
        }
    }

    #[test]
    fn ks_two_sample_is_invariant_under_increasing_maps(
        x in prop::collection::vec(-5.0f64..5.0, 50..120),
        y in prop::collection::vec(-5.0f64..5.0, 50..120),
    ) {
        let a = ks_two_sample(&x, &y, 0.01).unwrap();
        let fx: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let fy: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        let b = ks_two_sample(&fx, &fy, 0.01).unwrap();
        prop_assert_eq!(a.statistic, b.statistic);
        let c = ks_two_sample(&y, &x, 0.01).unwrap();
        prop_assert!((a.statistic - c.statistic).abs() < 1e-15);
    }

    #[test]
    fn rank_dcor_is_symmetric_and_monotone_invariant(
        pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 200..240),
        seed in any::<u64>(),
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let a = independence_test(&x, &y, 199, 0.01, seed).unwrap();
        let b = independence_test(&y, &x, 199, 0.01, seed).unwrap();
        prop_assert!((a.statistic - b.statistic).abs() < 1e-12);
        let fx: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
        let c = independence_test(&fx, &y, 199, 0.01, seed).unwrap();
        prop_assert!((a.statistic - c.statistic).abs() < 1e-12);
        let raw = distance_correlation(&x, &y);
        prop_assert!((raw - distance_correlation(&y, &x)).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&raw));
    }
}
