use smallball_core::entropy::{
    distinct_count_mc, expected_distinct, fit_rearrangement, gap_curve, interval_allocation, kuhn_entropy,
    random_diagonal, DiagonalSpec, RandomDiagonal,
};
use smallball_core::measure::{measure_from_gap_target, GapTarget, MeasureCase, MeasureOnN};
use smallball_core::process::ThetaSeq;
use smallball_core::{Error, RngSpec, StableIndex};

fn alpha(a: f64) -> StableIndex {
    StableIndex::new(a).unwrap()
}

fn mean_var(v: &[usize]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().map(|x| *x as f64).sum::<f64>() / n;
    let s = v.iter().map(|x| (*x as f64 - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, s)
}

/// Law of `N_m` by enumerating all `K^m` site sequences.
fn enumerate_counts(w: &[f64], m: usize) -> Vec<f64> {
    let k = w.len();
    let mut law = vec![0.0; m + 1];
    for code in 0..k.pow(m as u32) {
        let mut c = code;
        let mut p = 1.0;
        let mut seen = vec![false; k];
        for _ in 0..m {
            let s = c % k;
            c /= k;
            p *= w[s];
            seen[s] = true;
        }
        law[seen.iter().filter(|x| **x).count()] += p;
    }
    law
}

#[test]
fn distinct_counts_match_enumeration() {
    let reps = 100_000;
    for (i, w) in [vec![0.5, 0.5], vec![0.5, 0.3, 0.2], vec![0.7, 0.2, 0.1]].into_iter().enumerate() {
        let m_n = MeasureOnN::from_weights(w.clone()).unwrap();
        for m in 1..=3 {
            let law = enumerate_counts(&w, m);
            let v = distinct_count_mc(&m_n, m, reps, RngSpec::new(20 + i as u64, m as u64)).unwrap();
            for (n, p) in law.iter().enumerate() {
                let f = v.iter().filter(|x| **x == n).count() as f64 / reps as f64;
                let sd = (p * (1.0 - p) / reps as f64).sqrt();
                assert!((f - p).abs() <= 4.0 * sd + 1e-12, "w={w:?} m={m} N={n}: {f} vs {p}");
            }
            let e = expected_distinct(&m_n, m as u64).unwrap().total();
            let exact: f64 = law.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
            assert!((e - exact).abs() < 1e-12);
        }
    }
    let two = MeasureOnN::uniform(2).unwrap();
    assert!((expected_distinct(&two, 2).unwrap().total() - 1.5).abs() < 1e-15);
    let (m, _) = mean_var(&distinct_count_mc(&two, 2, reps, RngSpec::new(30, 0)).unwrap());
    assert!((m - 1.5).abs() < 0.01, "{m}");
}

#[test]
fn single_atom_counts() {
    let atom = MeasureOnN::atom();
    assert!(distinct_count_mc(&atom, 500, 20, RngSpec::new(31, 0)).unwrap().iter().all(|n| *n == 1));
    assert_eq!(expected_distinct(&atom, 1_000).unwrap().total(), 1.0);
    let d = random_diagonal(&atom, 4096, alpha(1.0), &[10, 100], &mut RngSpec::new(32, 0).rng()).unwrap();
    let want: f64 = (1..=4096).map(|j| 1.0 / (j as f64 * j as f64)).sum::<f64>().sqrt();
    assert_eq!(d.lambda.len(), 1);
    assert!((d.lambda[0].1 / want - 1.0).abs() < 1e-13);
    assert!(d.distinct.iter().all(|x| x.1 == 1));
}

#[test]
fn variance_of_counts_is_bounded() {
    let measures = [
        MeasureOnN::from_case(MeasureCase::A { nu: 2.0 }, 1_000_000).unwrap(),
        MeasureOnN::from_case(MeasureCase::B { a: 2.0, nu: 0.0 }, 1_000_000).unwrap(),
    ];
    for (i, m) in measures.iter().enumerate() {
        for mm in [100usize, 1_000, 10_000] {
            let v = distinct_count_mc(m, mm, 100, RngSpec::new(40 + i as u64, mm as u64)).unwrap();
            let (_, var) = mean_var(&v);
            let e = expected_distinct(m, mm as u64).unwrap().total();
            assert!(var <= 1.2 * e, "measure {i}, m={mm}: var {var} vs E {e}");
        }
    }
}

#[test]
fn mass_conservation_and_rearrangement() {
    let m = MeasureOnN::from_case(MeasureCase::A { nu: 2.0 }, 100_000).unwrap();
    for a in [0.7, 1.0, 1.6] {
        let d = random_diagonal(&m, 100_000, alpha(a), &[100, 1_000], &mut RngSpec::new(50, 0).rng()).unwrap();
        let direct: f64 = (1..=100_000).map(|j| (j as f64).powf(-2.0 / a)).sum();
        let sum_sq: f64 = d.lambda.iter().map(|x| x.1 * x.1).sum();
        assert!((d.total_mass / direct - 1.0).abs() < 1e-12);
        assert!((sum_sq / d.total_mass - 1.0).abs() < 1e-12);
        assert!(d.lambda_star.windows(2).all(|w| w[1] <= w[0]));
        let mut again = d.lambda_star.clone();
        again.sort_by(|x, y| y.total_cmp(x));
        assert_eq!(again, d.lambda_star);
        let mut raw: Vec<f64> = d.lambda.iter().map(|x| x.1).collect();
        raw.sort_by(|x, y| y.total_cmp(x));
        assert_eq!(raw, d.lambda_star);
        assert!(d.distinct.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(d.distinct.iter().all(|(mm, n)| n <= mm));
        assert_eq!(d.distinct.last().unwrap().1, d.occupied());
    }
}

#[test]
fn case_b_rearrangement_slope() {
    let m = MeasureOnN::from_case(MeasureCase::B { a: 2.0, nu: 0.0 }, 1_000_000).unwrap();
    let d = random_diagonal(&m, 1_000_000, alpha(1.0), &[], &mut RngSpec::new(60, 0).rng()).unwrap();
    let f = fit_rearrangement(&d, 10, 1_000, false).unwrap();
    assert!((f.tau + 2.0).abs() < 0.15, "{f:?}");
    assert!(matches!(fit_rearrangement(&d, 10, d.occupied() + 1, false), Err(Error::OutOfRange(_))));
}

#[test]
fn synthetic_rearrangement_fits() {
    let pow = RandomDiagonal::from_values((1..=500).map(|k| (k, (k as f64).powi(-2))).collect(), 1000);
    let f = fit_rearrangement(&pow, 1, 500, false).unwrap();
    assert!((f.tau + 2.0).abs() < 1e-12);
    let guard = |k: usize| (k as f64 + 2.0).ln();
    let log = RandomDiagonal::from_values((1..=500).map(|k| (k, 1.0 / (k as f64 * guard(k)))).collect(), 1000);
    let f = fit_rearrangement(&log, 1, 500, true).unwrap();
    assert!((f.tau + 1.0).abs() < 1e-10 && (f.theta + 1.0).abs() < 1e-10, "{f:?}");
}

#[test]
fn gap_of_matched_diagonal_is_one() {
    let theta: Vec<f64> = (1..=200).map(|n| (n as f64).powf(-1.5)).collect();
    let spec = DiagonalSpec { theta: ThetaSeq::Explicit(theta.clone()), p: 2.0, q: 1.0 };
    let diag = RandomDiagonal::from_values(theta.iter().copied().enumerate().map(|(i, v)| (i + 1, v)).collect(), 1000);
    let g = gap_curve(&spec, &diag, alpha(1.0), &[1, 10, 100, 200]).unwrap();
    assert!(g.gap.iter().all(|x| (x - 1.0).abs() < 1e-12));
    assert!(gap_curve(&spec, &diag, alpha(1.0), &[201]).is_err());
}

#[test]
fn kuhn_and_allocation_examples() {
    let spec = DiagonalSpec { theta: ThetaSeq::Polynomial { exponent: 1.5 }, p: 2.0, q: 1.0 };
    let grid: Vec<usize> = (1..=1000).collect();
    let e = kuhn_entropy(&spec, &grid).unwrap();
    assert!(e.e.iter().zip(&grid).all(|(v, n)| (v / (*n as f64).powf(-1.0) - 1.0).abs() < 1e-12));
    let one = DiagonalSpec { theta: ThetaSeq::Explicit(vec![1.0; 64]), p: 2.0, q: 1.0 };
    assert!(matches!(kuhn_entropy(&one, &[1, 2, 64]), Err(Error::Regularity(_))));

    let target = GapTarget::LogPower { exponent: 2.0 / 1.2 };
    let al = interval_allocation(&target, &ThetaSeq::Polynomial { exponent: 2.0 }, alpha(1.2), 2.0, 10_000).unwrap();
    assert!(al.sizes.iter().sum::<f64>() <= 1.0);
    // gap bound is c^{-1/α} d_n
    let d = target.values(10_000).unwrap();
    for n in [10, 100, 10_000] {
        assert!((al.gap_bound[n - 1] / (al.c.powf(-1.0 / 1.2) * d[n - 1]) - 1.0).abs() < 1e-10);
    }
    let harmonic = interval_allocation(&GapTarget::Constant { value: 1.0 }, &ThetaSeq::Polynomial { exponent: 2.0 }, alpha(1.0), 2.0, 1000);
    assert!(matches!(harmonic, Err(Error::Regularity(_))));
}

#[test]
fn gap_target_construction() {
    assert!(measure_from_gap_target(&GapTarget::Constant { value: 1.0 }, 1.0, 1000).is_err());
    let m = measure_from_gap_target(&GapTarget::LogPower { exponent: 1.0 }, 1.0, 1_000_000).unwrap();
    assert!(m.is_nonincreasing());
    let s: f64 = m.weights().iter().sum::<f64>() + m.truncated_mass();
    assert!((s - 1.0).abs() < 1e-12);
}

/// Per-seed medians of `G_n/log(n)^{1/α}` for case (a).
#[test]
fn gap_level_reproducible_across_seeds() {
    let a = alpha(1.0);
    let m = MeasureOnN::from_case(MeasureCase::A { nu: 2.0 }, 1_000_000).unwrap();
    let spec = DiagonalSpec::from_measure(&m, a, 2.0);
    let grid: Vec<usize> = (0..=20).map(|i| (100.0 * 10f64.powf(i as f64 / 10.0)).round() as usize).collect();
    let mut medians = Vec::new();
    for s in 0..20 {
        let d = random_diagonal(&m, 1_000_000, a, &[], &mut RngSpec::new(70, s).rng()).unwrap();
        let n_max = d.resolved_rank();
        let ns: Vec<usize> = grid.iter().copied().filter(|n| *n <= n_max).collect();
        assert!(ns.len() >= 10, "resolved range too short: {n_max}");
        let g = gap_curve(&spec, &d, a, &ns).unwrap();
        let mut r: Vec<f64> = g.gap.iter().zip(&ns).map(|(x, n)| x / (*n as f64).ln()).collect();
        r.sort_by(f64::total_cmp);
        medians.push(r[r.len() / 2]);
    }
    let hi = medians.iter().cloned().fold(f64::MIN, f64::max);
    let lo = medians.iter().cloned().fold(f64::MAX, f64::min);
    assert!(hi / lo < 2.0, "{medians:?}");
}
