//! Statistical procedures checked against independent oracles: brute-force
//! enumeration, statrs, published tables and simulation.

use approx::assert_relative_eq;
use dualsim::stats::special::{normal_cdf, student_t_quantile};
use dualsim::stats::{
    classify_ci, classify_interval, descriptive, mann_whitney, mean_ci, paired_t_ci, CiConclusion,
    MwMethod, DEFAULT_EXACT_THRESHOLD,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ContinuousCDF, Normal as SNormal, StudentsT};

/// Two-sided p by enumerating every labelling of the pooled ranks.
fn brute_force_p(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len();
    let mut pooled: Vec<(f64, bool)> = x
        .iter()
        .map(|&v| (v, true))
        .chain(y.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = pooled.len();
    let u_of = |mask: u32| -> f64 {
        // U = sum of x ranks − n(n+1)/2
        let rank_sum: usize = (0..total)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| i + 1)
            .sum();
        rank_sum as f64 - (n * (n + 1)) as f64 / 2.0
    };
    let observed_mask: u32 = pooled
        .iter()
        .enumerate()
        .filter(|(_, p)| p.1)
        .map(|(i, _)| 1 << i)
        .sum();
    let u = u_of(observed_mask);
    let (mut le, mut ge, mut all) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let v = u_of(mask);
        all += 1;
        if v <= u {
            le += 1;
        }
        if v >= u {
            ge += 1;
        }
    }
    let p = (2.0 * le.min(ge) as f64 / all as f64).min(1.0);
    (u, p)
}

#[test]
fn exact_mann_whitney_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for n in 1..=7 {
        for m in 1..=7 {
            // 200 datasets spread over the 49 size pairs, at least 4 each
            for _ in 0..5 {
                let mut pool: Vec<f64> = (0..(n + m))
                    .map(|i| i as f64 + rng.random::<f64>() * 0.5)
                    .collect();
                pool.shuffle(&mut rng);
                let (x, y) = pool.split_at(n);
                let r = mann_whitney(x, y, DEFAULT_EXACT_THRESHOLD).unwrap();
                let (u, p) = brute_force_p(x, y);
                assert_eq!(r.method, MwMethod::Exact);
                assert_eq!(r.u_statistic, u);
                assert!(
                    (r.p_value - p).abs() < 1e-12,
                    "n={n} m={m}: {} vs {p}",
                    r.p_value
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 200);
}

#[test]
fn mann_whitney_fixtures() {
    let r = mann_whitney(&[1.0, 2.0], &[3.0, 4.0], DEFAULT_EXACT_THRESHOLD).unwrap();
    assert_relative_eq!(r.p_value, 1.0 / 3.0, epsilon = 1e-15);
    let r = mann_whitney(&[1.0, 3.0, 5.0], &[2.0, 4.0, 6.0], DEFAULT_EXACT_THRESHOLD).unwrap();
    assert_eq!(r.u_statistic, 3.0);
    assert_relative_eq!(r.p_value, 0.70, epsilon = 1e-15);
}

#[test]
fn normal_approximation_matches_statrs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
    let y: Vec<f64> = (0..55).map(|_| rng.random::<f64>() + 0.2).collect();
    let r = mann_whitney(&x, &y, DEFAULT_EXACT_THRESHOLD).unwrap();
    assert_eq!(r.method, MwMethod::NormalApproximation);
    let (n, m) = (40.0, 55.0);
    let sd = (n * m * (n + m + 1.0) / 12.0f64).sqrt();
    let z = ((r.u_statistic - n * m / 2.0).abs() - 0.5) / sd;
    let expected = 2.0 * SNormal::new(0.0, 1.0).unwrap().cdf(-z);
    assert_relative_eq!(r.p_value, expected, max_relative = 1e-10);
}

proptest! {
    #[test]
    fn u_symmetry(mut pool in prop::collection::hash_set(0i32..10_000, 2..30), split in 1usize..29) {
        let mut pool: Vec<f64> = pool.drain().map(f64::from).collect();
        pool.sort_by(f64::total_cmp);
        let split = split.min(pool.len() - 1);
        // interleave so both samples span the range
        let (x, y): (Vec<f64>, Vec<f64>) = {
            let mut x = Vec::new();
            let mut y = Vec::new();
            for (i, v) in pool.iter().enumerate() {
                if (i * 7919) % pool.len() < split { x.push(*v) } else { y.push(*v) }
            }
            (x, y)
        };
        prop_assume!(!x.is_empty() && !y.is_empty());
        let a = mann_whitney(&x, &y, DEFAULT_EXACT_THRESHOLD).unwrap();
        let b = mann_whitney(&y, &x, DEFAULT_EXACT_THRESHOLD).unwrap();
        prop_assert_eq!(a.u_statistic + b.u_statistic, (x.len() * y.len()) as f64);
        prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
    }

    #[test]
    fn shift_drives_p_to_minimum(x in prop::collection::vec(0.0f64..10.0, 3..8), y in prop::collection::vec(0.0f64..10.0, 3..8)) {
        let shifted: Vec<f64> = x.iter().map(|v| v + 1000.0).collect();
        let r = mann_whitney(&shifted, &y, DEFAULT_EXACT_THRESHOLD).unwrap();
        prop_assert_eq!(r.u_statistic, (x.len() * y.len()) as f64);
        let r2 = mann_whitney(&shifted.iter().map(|v| v + 5000.0).collect::<Vec<_>>(), &y, DEFAULT_EXACT_THRESHOLD).unwrap();
        prop_assert!(r2.p_value <= r.p_value + 1e-15);
        if r.method == MwMethod::Exact {
            // two most extreme arrangements out of C(n+m, n)
            let (n, m) = (x.len() as u64, y.len() as u64);
            let mut c = 1u64;
            for i in 0..n { c = c * (n + m - i) / (i + 1); }
            prop_assert!((r.p_value - 2.0 / c as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn classify_invariant_under_positive_scaling(d in prop::collection::vec(-5.0f64..5.0, 2..30), k in 0.01f64..100.0) {
        let a = paired_t_ci(&d, 0.95).unwrap();
        let scaled: Vec<f64> = d.iter().map(|v| v * k).collect();
        let b = paired_t_ci(&scaled, 0.95).unwrap();
        prop_assert_eq!(classify_ci(&a), classify_ci(&b));
    }
}

#[test]
fn paired_t_textbook_interval() {
    let ci = paired_t_ci(&[2.0, 4.0, 6.0, 8.0], 0.95).unwrap();
    assert_relative_eq!(ci.ci_lower, 0.892, epsilon = 1e-3);
    assert_relative_eq!(ci.ci_upper, 9.108, epsilon = 1e-3);
    assert_relative_eq!(student_t_quantile(0.975, 3.0), 3.18245, epsilon = 1e-5);
    let m = mean_ci(&[2.0, 4.0, 6.0, 8.0], 0.95).unwrap();
    assert_eq!((m.ci_lower, m.ci_upper), (ci.ci_lower, ci.ci_upper));
}

#[test]
fn t_quantiles_match_statrs() {
    for df in [1.0, 2.0, 3.0, 5.0, 9.0, 29.0, 99.0, 1000.0] {
        let t = StudentsT::new(0.0, 1.0, df).unwrap();
        for p in [0.6, 0.9, 0.95, 0.975, 0.9875, 0.995, 0.9995] {
            assert_relative_eq!(
                student_t_quantile(p, df),
                t.inverse_cdf(p),
                max_relative = 1e-8
            );
        }
    }
    let n = SNormal::new(0.0, 1.0).unwrap();
    for z in [-8.0, -3.0, -1.0, -0.1, 0.0, 0.5, 2.0, 6.0] {
        assert_relative_eq!(normal_cdf(z), n.cdf(z), max_relative = 1e-9);
    }
}

#[test]
fn paired_t_coverage() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let true_mean = 1.3;
    let dist = Normal::new(true_mean, 2.0).unwrap();
    let trials = 10_000;
    let mut covered = 0;
    for _ in 0..trials {
        let d: Vec<f64> = (0..10).map(|_| dist.sample(&mut rng)).collect();
        let ci = paired_t_ci(&d, 0.95).unwrap();
        if ci.ci_lower <= true_mean && true_mean <= ci.ci_upper {
            covered += 1;
        }
    }
    let rate = covered as f64 / trials as f64;
    assert!((0.935..=0.965).contains(&rate), "coverage {rate}");
}

#[test]
fn interval_verdicts() {
    assert_eq!(classify_interval(0.42, 1.17), CiConclusion::FirstGreater);
    assert_eq!(classify_interval(-1.0, 1.0), CiConclusion::NoDifference);
    assert_eq!(classify_interval(-2.0, -1.0), CiConclusion::SecondGreater);
    assert_eq!(classify_interval(0.0, 1.0), CiConclusion::NoDifference);
    let flat = paired_t_ci(&[0.5; 6], 0.975).unwrap();
    assert_eq!((flat.ci_lower, flat.ci_upper), (0.5, 0.5));
    assert_eq!(classify_ci(&flat), CiConclusion::FirstGreater);
}

#[test]
fn descriptive_matches_statrs() {
    use statrs::statistics::{Data, Distribution as _, Median};
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let v: Vec<f64> = (0..101).map(|_| rng.random::<f64>() * 5.0).collect();
    let d = descriptive(&v).unwrap();
    let s = Data::new(v.clone());
    assert_relative_eq!(d.mean, s.mean().unwrap(), max_relative = 1e-12);
    assert_relative_eq!(
        d.variance.unwrap(),
        s.variance().unwrap(),
        max_relative = 1e-10
    );
    assert_relative_eq!(d.median, s.median(), max_relative = 1e-12);
}
