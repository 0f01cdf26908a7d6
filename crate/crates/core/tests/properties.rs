//! Property tests for the invariants of each module.

mod common;

use common::{random_measure, random_plane_space};
use metric_bounds::bounds::{
    best_bound_over_m, eps_tilde, generalization_bound, occam_bound, rate_r, worstcase_tau, BoundInputs,
    Regime,
};
use metric_bounds::embed::{bourgain_embed, compose, identity_embed, jl_reduce, measure_distortion};
use metric_bounds::experiments::{config_hash, run_concentration, ExperimentConfig, NGrid};
use metric_bounds::learning::{
    discretization_slack, discretize_function, riesz_eval, sup_gap, BasisKind, LossFn,
};
use metric_bounds::metric::{euclidean, greedy_packing, product_space, round_by_scan, DyadicGrid, FiniteMetricSpace, PackingSet};
use metric_bounds::rng;
use metric_bounds::transport::{tv_distance, wasserstein_exact};
use proptest::prelude::*;
use rand::Rng;

fn cloud(seed: u64, k: usize, d: usize) -> FiniteMetricSpace {
    let mut r = rng::seeded(seed);
    FiniteMetricSpace::from_coords((0..k).map(|_| (0..d).map(|_| r.random_range(-3.0..3.0)).collect()).collect())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euclidean_clouds_are_metric(seed in any::<u64>(), k in 1usize..25, d in 1usize..5) {
        let s = cloud(seed, k, d);
        for i in 0..k {
            prop_assert_eq!(s.d(i, i), 0.0);
            for j in 0..k {
                prop_assert_eq!(s.d(i, j), s.d(j, i));
                for l in 0..k {
                    prop_assert!(s.d(i, l) <= s.d(i, j) + s.d(j, l) + 1e-12);
                }
            }
        }
        let scan = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| s.d(i, j)).fold(0.0, f64::max);
        prop_assert_eq!(s.diameter(), scan);
    }

    #[test]
    fn product_diameter_is_sum(seed in any::<u64>(), kx in 1usize..6, ky in 1usize..6) {
        let x = cloud(seed, kx, 2);
        let y = cloud(seed ^ 0x9e37, ky, 1);
        let xy = product_space(&x, &y).unwrap();
        prop_assert_eq!(xy.k(), kx * ky);
        prop_assert!((xy.diameter() - (x.diameter() + y.diameter())).abs() <= 1e-12);
        for a in 0..xy.k() {
            for b in 0..xy.k() {
                let want = x.d(a / ky, b / ky) + y.d(a % ky, b % ky);
                prop_assert_eq!(xy.d(a, b), want);
            }
        }
    }

    #[test]
    fn grid_is_cartesian_power(d in 1usize..3, p in 0u32..4, m in 1u64..5) {
        let g = DyadicGrid::new(d, p, m).unwrap();
        let line = DyadicGrid::new(1, p, m).unwrap();
        prop_assert_eq!(g.axis(), line.axis());
        prop_assert_eq!(g.len(), line.len().pow(d as u32));
        for (i, pt) in g.points().iter().enumerate() {
            prop_assert_eq!(g.index_of(pt), Some(i));
            prop_assert!(pt.iter().all(|v| line.axis().contains(v)));
        }
        // every axis value is a/2^j with |a| <= M, j <= p
        for &v in g.axis() {
            let scaled = v * (1u64 << p) as f64;
            prop_assert_eq!(scaled, scaled.round());
            prop_assert!(v.abs() <= m as f64);
        }
    }

    #[test]
    fn rounding_is_idempotent_and_nearest(seed in any::<u64>(), d in 1usize..3, p in 0u32..3, m in 1u64..4) {
        let g = DyadicGrid::new(d, p, m).unwrap();
        let mut r = rng::seeded(seed);
        for _ in 0..20 {
            let y: Vec<f64> = (0..d).map(|_| r.random_range(-(m as f64 + 1.0)..(m as f64 + 1.0))).collect();
            let once = g.round(&y);
            prop_assert_eq!(g.round(&once), once.clone());
            prop_assert_eq!(&once, &round_by_scan(&g, &y));
        }
    }

    #[test]
    fn packing_separation_and_size(seed in any::<u64>(), d in 1usize..4, delta in 0.3f64..1.2) {
        let p = greedy_packing(d, delta, &mut rng::seeded(seed), 2_000).unwrap();
        prop_assert!(p.min_pairwise() >= delta || p.len() < 2);
        prop_assert!((p.len() as f64).ln() <= PackingSet::ln_upper_bound(d, delta) + 1e-12);
        prop_assert!(p.points.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn distortion_invariant_under_similarity(seed in any::<u64>(), k in 2usize..15, scale in 0.01f64..100.0, angle in 0.0f64..6.3) {
        let s = cloud(seed, k, 2);
        let mut r = rng::seeded(seed ^ 1);
        // a generic injective map: random perturbation of the points
        let images: Vec<Vec<f64>> = s.coords().unwrap().iter()
            .map(|c| vec![c[0] + r.random_range(-0.1..0.1), c[1] + r.random_range(-0.1..0.1)])
            .collect();
        let Ok(base) = measure_distortion(&images, &s) else { return Ok(()); };
        let (sn, cs) = angle.sin_cos();
        let moved: Vec<Vec<f64>> = images.iter()
            .map(|v| vec![scale * (cs * v[0] - sn * v[1]), scale * (sn * v[0] + cs * v[1])])
            .collect();
        let after = measure_distortion(&moved, &s).unwrap();
        prop_assert!((after.tau - base.tau).abs() <= 1e-9 * base.tau);
        prop_assert!((after.lip_upper - scale * base.lip_upper).abs() <= 1e-9 * scale * base.lip_upper);
    }

    #[test]
    fn identity_ratios_are_one(seed in any::<u64>(), k in 2usize..20, d in 1usize..4, pad in 0usize..4) {
        let s = cloud(seed, k, d);
        let e = identity_embed(&s, d + pad).unwrap();
        for i in 0..k {
            for j in i + 1..k {
                let ratio = euclidean(&e.images[i], &e.images[j]) / s.d(i, j);
                prop_assert!((ratio - 1.0).abs() <= 1e-12);
            }
        }
        prop_assert_eq!(e.tau, 1.0);
    }

    #[test]
    fn wasserstein_is_a_metric_on_measures(seed in any::<u64>(), k in 1usize..12) {
        let mut r = rng::seeded(seed);
        let s = random_plane_space(&mut r, k);
        let (a, b, c) = (random_measure(&mut r, k), random_measure(&mut r, k), random_measure(&mut r, k));
        let w = |x, y| wasserstein_exact(&s, x, y).unwrap().0;
        let (ab, ba, bc, ac) = (w(&a, &b), w(&b, &a), w(&b, &c), w(&a, &c));
        prop_assert!((ab - ba).abs() <= 1e-9);
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert!(w(&a, &a).abs() <= 1e-12);
        prop_assert!(ab <= s.diameter() * tv_distance(&a, &b).unwrap() + 1e-9);
    }

    #[test]
    fn regime_follows_its_predicates(m in 1usize..5000, k in 2u64..2000, euclid in proptest::option::of(1usize..200)) {
        let ln_k = (k as f64).ln();
        let cutoff = (8.0 * ln_k).ceil() as usize;
        match worstcase_tau(m, ln_k, euclid) {
            Ok((tau, regime)) => {
                prop_assert!(tau >= 1.0);
                let expected = match euclid {
                    Some(d) if m >= d => Regime::Identity,
                    Some(_) if m <= 2 => Regime::EuclideanLine,
                    Some(_) if m <= cutoff => Regime::EuclideanLow,
                    Some(_) => Regime::EuclideanHigh,
                    None if m <= 2 => Regime::Line,
                    None if m <= cutoff => Regime::Low,
                    None if (m as f64) < 2f64.powf(k as f64) => Regime::High,
                    None => Regime::Saturated,
                };
                prop_assert_eq!(regime, expected);
                if m <= 2 && euclid.is_none_or(|d| m < d) {
                    prop_assert_eq!(tau, 12.0 * k as f64);
                }
            }
            // only the low row can be undefined, where eps_tilde is
            Err(_) => {
                prop_assert!(m >= 3 && m <= cutoff && euclid.is_none());
                prop_assert!(eps_tilde(m, ln_k).is_err());
            }
        }
    }

    #[test]
    fn bound_monotone_in_n_tau_and_delta(ln_k in 0.5f64..40.0, ln_n in 0.0f64..30.0, m in 1usize..50, tau in 1.0f64..100.0) {
        let inputs = BoundInputs { ln_k, ln_n, m, ..BoundInputs::from_counts(2.0, 1.0) };
        let b = generalization_bound(&inputs, tau).unwrap();
        let more_n = generalization_bound(&BoundInputs { ln_n: ln_n + 1.0, ..inputs.clone() }, tau).unwrap();
        let more_tau = generalization_bound(&inputs, tau * 1.5).unwrap();
        let less_delta = generalization_bound(&BoundInputs { delta: 0.01, ..inputs.clone() }, tau).unwrap();
        prop_assert!(more_n < b);
        prop_assert!(more_tau > b);
        prop_assert!(less_delta > b);
        prop_assert!(rate_r(m, ln_n + 1.0) < rate_r(m, ln_n));
    }

    #[test]
    fn best_bound_equals_exhaustive_scan(ln_k in 0.7f64..40.0, ln_n in 0.0f64..45.0, hi in 1usize..120, euclid in proptest::option::of(1usize..150)) {
        let inputs = BoundInputs { ln_k, ln_n, euclidean_d: euclid, ..BoundInputs::from_counts(2.0, 1.0) };
        let scan: Vec<(usize, f64)> = (1..=hi)
            .filter_map(|m| {
                let (tau, _) = worstcase_tau(m, ln_k, euclid).ok()?;
                Some((m, generalization_bound(&inputs.with_m(m), tau).unwrap()))
            })
            .collect();
        match best_bound_over_m(&inputs, 1..=hi) {
            Ok(best) => {
                let min = scan.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
                let first = scan.iter().find(|x| x.1 == min).unwrap().0;
                prop_assert_eq!(best.value, min);
                prop_assert_eq!(best.m_star, first);
                prop_assert_eq!(best.rows.len(), hi);
            }
            Err(_) => prop_assert!(scan.is_empty()),
        }
    }

    #[test]
    fn log_space_matches_direct_evaluation(k in 2u64..100_000, n in 1u64..1_000_000, delta in 0.01f64..0.99) {
        let (ln_k, ln_n) = ((k as f64).ln(), (n as f64).ln());
        let direct = (((2.0 / delta).ln() + k as f64 * 2f64.ln()) / (2.0 * n as f64)).sqrt();
        let o = occam_bound(ln_k, ln_n, delta).unwrap();
        prop_assert!((o - direct).abs() <= 1e-12 * direct);
        for m in 3..8usize {
            let (tau, regime) = worstcase_tau(m, ln_k, Some(50)).unwrap();
            if regime == Regime::EuclideanLow {
                let direct = 15.0 * (k as f64).powf(2.0 / m as f64) * (ln_k / m as f64).sqrt();
                prop_assert!((tau - direct).abs() <= 1e-10 * direct);
            }
        }
    }

    #[test]
    fn riesz_waves_are_periodic_and_bounded(j in 1u32..20, t in 0.0f64..1.0) {
        for kind in [BasisKind::Cos, BasisKind::Sin] {
            let v = riesz_eval(kind, j, t);
            prop_assert!((-1.0..=1.0).contains(&v));
            let shifted = riesz_eval(kind, j, t + 1.0 / j as f64);
            prop_assert!((shifted - v).abs() <= 1e-9 * j as f64 + 1e-12);
            let near = riesz_eval(kind, j, t + 1e-7);
            prop_assert!((near - v).abs() <= 4.0 * j as f64 * 1e-7 + 1e-12);
        }
    }

    #[test]
    fn discretized_functions_obey_the_lemma(seed in any::<u64>(), d in 1usize..3, p in 0u32..4, m in 1u64..4, lip in 0.05f64..4.0) {
        let g_in = DyadicGrid::new(d, p, m).unwrap();
        let g_out = DyadicGrid::new(1, p, m).unwrap();
        let mut r = rng::seeded(seed);
        let c: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
        let v0 = r.random_range(-1.0..1.0);
        let bound = m as f64;
        let f = |x: &[f64]| (lip * (v0 + euclidean(x, &c))).clamp(-bound, bound);
        let fbar = discretize_function(f, &g_in, &g_out).unwrap();
        prop_assert!(fbar.hypothesis.lip_upper <= (lip + discretization_slack(&g_in, &g_out)) * (1.0 + 1e-12));
    }

    #[test]
    fn gap_bounded_by_lbar_wasserstein(seed in any::<u64>(), kx in 1usize..5, ky in 1usize..4, lip in 0.1f64..3.0) {
        let mut r = rng::seeded(seed);
        let x = cloud(seed, kx, 2);
        let y = cloud(seed ^ 7, ky, 1);
        let xy = product_space(&x, &y).unwrap();
        let (p, q) = (random_measure(&mut r, xy.k()), random_measure(&mut r, xy.k()));
        let loss = LossFn::absolute(&y);
        let gap = sup_gap(&x, &y, lip, &p, &q, &loss).unwrap().sup_gap;
        let w = wasserstein_exact(&xy, &p, &q).unwrap().0;
        prop_assert!(gap <= loss.lip_upper * lip.max(1.0) * w + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn composition_is_submultiplicative(seed in any::<u64>(), k in 3usize..12) {
        let s = cloud(seed, k, 3);
        let mut r = rng::seeded(seed);
        let b = bourgain_embed(&s, &mut r).unwrap();
        let m = (8.0 * (k as f64).ln()).ceil() as usize + 4;
        let jl = jl_reduce(&s, &b, m, &mut r).unwrap();
        // the JL stage alone, measured on the Bourgain images
        let inner = FiniteMetricSpace::from_coords(b.images.clone()).unwrap();
        let stage = measure_distortion(&jl.images, &inner).unwrap();
        prop_assert!(jl.tau <= b.tau * stage.tau * (1.0 + 1e-9));
        // homothety: constants double, tau unchanged
        let doubled = compose(&s, &b, |v| v.iter().map(|x| 2.0 * x).collect(), "double").unwrap();
        prop_assert!((doubled.lip_upper - 2.0 * b.lip_upper).abs() <= 1e-12 * b.lip_upper);
        prop_assert!((doubled.tau - b.tau).abs() <= 1e-9 * b.tau);
    }

    #[test]
    fn concentration_output_is_deterministic(seed in any::<u64>()) {
        let c = ExperimentConfig { seed, replicates: 8, n_grid: NGrid::List(vec![10.0, 40.0]), ..ExperimentConfig::default() };
        let (a, _) = run_concentration(&c).unwrap();
        let (b, _) = run_concentration(&c).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
        prop_assert_eq!(&config_hash(&c), &a.metadata.config_hash);
        prop_assert!(a.malformed_rows().is_empty());
    }
}
