use proptest::prelude::*;

use smallball_core::entropy::{expected_distinct, random_diagonal};
use smallball_core::measure::MeasureOnN;
use smallball_core::process::{norm, sample_path_increments, Grid, KernelSpec, NormSpec, PathSample};
use smallball_core::smalldev::{fit_rate_points, holder_rate, HitCounter};
use smallball_core::stable::{gamma_arrivals, sample_sas};
use smallball_core::{RngSpec, StableIndex};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replay_bit_identical(seed in any::<u64>(), sub in 0u64..1000, a in 0.05f64..=2.0) {
        let spec = RngSpec::new(seed, sub);
        let alpha = StableIndex::new(a).unwrap();
        let (mut r1, mut r2) = (spec.rng(), spec.rng());
        for _ in 0..20 {
            prop_assert_eq!(sample_sas(alpha, &mut r1).to_bits(), sample_sas(alpha, &mut r2).to_bits());
        }
    }

    #[test]
    fn arrivals_strictly_increase(seed in any::<u64>(), j in 1usize..500) {
        let g = gamma_arrivals(j, &mut RngSpec::new(seed, 0).rng());
        prop_assert_eq!(g.len(), j);
        prop_assert!(g[0] > 0.0);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn measure_normalised(w in prop::collection::vec(0.0f64..10.0, 1..40), tail in 0.0f64..5.0) {
        prop_assume!(w.iter().sum::<f64>() > 1e-6);
        let m = MeasureOnN::with_tail(w.clone(), tail).unwrap();
        let s: f64 = m.weights().iter().sum::<f64>() + m.truncated_mass();
        prop_assert!((s - 1.0).abs() < 1e-12);
        prop_assert_eq!(m.tail(1), 1.0);
        prop_assert!(m.tails().windows(2).all(|t| t[1] <= t[0] + 1e-15));
        for n in 1..=m.horizon() {
            if m.weight(n) > 0.0 {
                let u = m.tail(n) - 0.5 * m.weight(n);
                prop_assert_eq!(m.locate(u), Some(n));
            }
        }
    }

    #[test]
    fn diagonal_invariants(w in prop::collection::vec(0.01f64..1.0, 1..20), a in 0.3f64..1.95, seed in any::<u64>()) {
        let m = MeasureOnN::from_weights(w).unwrap();
        let alpha = StableIndex::new(a).unwrap();
        let d = random_diagonal(&m, 2000, alpha, &[1, 10, 100], &mut RngSpec::new(seed, 0).rng()).unwrap();
        let sq: f64 = d.lambda.iter().map(|x| x.1 * x.1).sum();
        prop_assert!((sq / d.total_mass - 1.0).abs() < 1e-12);
        prop_assert!(d.lambda_star.windows(2).all(|x| x[1] <= x[0]));
        prop_assert!(d.distinct.windows(2).all(|x| x[1].1 >= x[0].1));
        prop_assert!(d.distinct.iter().all(|(mm, n)| n <= mm && *n <= m.horizon()));
        prop_assert_eq!(d.distinct_at(1), Some(1));
    }

    #[test]
    fn expected_distinct_bounds(w in prop::collection::vec(0.01f64..1.0, 1..30), mm in 1u64..10_000) {
        let m = MeasureOnN::from_weights(w).unwrap();
        let e = expected_distinct(&m, mm).unwrap().total();
        prop_assert!(e >= 1.0 - 1e-12);
        prop_assert!(e <= (mm as f64).min(m.horizon() as f64) + 1e-9);
        prop_assert!((expected_distinct(&m, 1).unwrap().total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counter_merge_commutes(xs in prop::collection::vec(0.0f64..2.0, 0..200), cut in 0usize..200) {
        let eps = [1.5, 1.0, 0.5, 0.1];
        let cut = cut.min(xs.len());
        let fill = |v: &[f64]| { let mut c = HitCounter::new(&eps).unwrap(); v.iter().for_each(|x| c.record(*x)); c };
        let (a, b) = (fill(&xs[..cut]), fill(&xs[cut..]));
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        prop_assert_eq!(ab.finish(), ba.finish());
        prop_assert_eq!(ab.finish(), fill(&xs).finish());
    }

    #[test]
    fn fit_recovers_exact_laws(tau in 0.2f64..4.0, theta in -2.0f64..2.0, c in 0.1f64..10.0) {
        let eps: Vec<f64> = (0..12).map(|i| 0.3 * 0.7f64.powi(i)).collect();
        let phi: Vec<f64> = eps.iter().map(|e| c * e.powf(-tau) * (-e.ln()).powf(theta)).collect();
        let f = fit_rate_points(&eps, &phi, &vec![1.0; eps.len()], true).unwrap();
        prop_assert!((f.tau - tau).abs() < 1e-8 && (f.theta - theta).abs() < 1e-7);
        prop_assert!((f.constant() / c - 1.0).abs() < 1e-7);
    }

    #[test]
    fn holder_rate_matches_rl(h in 0.05f64..1.0, a in 0.5f64..=2.0) {
        let beta = h - 1.0 / a + 0.5;
        prop_assume!(beta > 0.0 && beta <= 1.0);
        prop_assert!((holder_rate(beta, 1.0, a).unwrap() - 1.0 / h).abs() < 1e-9);
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), c in -5.0f64..5.0, q in 1.0f64..6.0) {
        let alpha = StableIndex::new(1.3).unwrap();
        let p = sample_path_increments(&KernelSpec::LevyMotion, alpha, Grid::uniform(64), &mut RngSpec::new(seed, 0).rng()).unwrap();
        let scaled = PathSample::new(p.grid, p.values.iter().map(|v| c * v).collect()).unwrap();
        for spec in [NormSpec::Lq(q), NormSpec::Sup] {
            let (n1, n2) = (norm(&p, &spec).unwrap(), norm(&scaled, &spec).unwrap());
            prop_assert!((n2 - c.abs() * n1).abs() <= 1e-12 * (1.0 + n2));
        }
    }
}
