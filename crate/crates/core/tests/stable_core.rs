use std::f64::consts::PI;

use smallball_core::measure::MeasureOnN;
use smallball_core::stable::{c_alpha, gamma_arrivals, sample_sas, sample_sites, SiteLaw, Sites};
use smallball_core::{RngSpec, StableIndex};

/// Trapezoid rule for a smooth integrand on a truncated line.
fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64) -> f64 {
    let n = ((hi - lo) / h).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let mut s = 0.5 * (f(lo) + f(hi));
    for i in 1..n {
        s += f(lo + i as f64 * h);
    }
    s * h
}

/// `Γ(x) = ∫ exp(x u - e^u) du`.
fn gamma_quad(x: f64) -> f64 {
    trapezoid(|u| (x * u - u.exp()).exp(), -60.0 / x.min(1.0), 5.0, 2e-3)
}

/// Independent c_α: the sine integral as `Γ(α)^{-1} ∫ t^{α-1}/(1+t²) dt`
/// (substituting `t = e^u`), the Gaussian moment through quadrature Γ.
fn c_alpha_oracle(a: f64) -> f64 {
    let decay = a.min(2.0 - a);
    let span = 50.0 / decay;
    let mellin = trapezoid(|u| (a * u).exp() / (1.0 + (2.0 * u).exp()), -span, span, 0.02);
    let sine = mellin / gamma_quad(a);
    let moment = 2f64.powf(a / 2.0) * gamma_quad((a + 1.0) / 2.0) / PI.sqrt();
    2f64.sqrt() * (sine * moment).powf(-1.0 / a)
}

fn alpha(a: f64) -> StableIndex {
    StableIndex::new(a).unwrap()
}

#[test]
fn c_alpha_cauchy_value() {
    let c = c_alpha(alpha(1.0)).unwrap();
    assert!((c - 2.0 / PI.sqrt()).abs() < 1e-9, "{c}");
}

#[test]
fn c_alpha_half_closed_form() {
    // sine integral √(π/2), moment 2^{1/4} Γ(3/4)/√π
    let g34 = 1.225_416_702_465_177_6;
    let moment = 2f64.powf(0.25) * g34 / PI.sqrt();
    let want = 2f64.sqrt() * ((PI / 2.0).sqrt() * moment).powf(-2.0);
    let c = c_alpha(alpha(0.5)).unwrap();
    assert!((c / want - 1.0).abs() < 1e-12, "{c} vs {want}");
}

#[test]
fn c_alpha_matches_quadrature_grid() {
    for i in 0..20 {
        let a = 0.1 + 0.09 * i as f64;
        let c = c_alpha(alpha(a)).unwrap();
        let o = c_alpha_oracle(a);
        assert!(c.is_finite() && c > 0.0);
        assert!((c / o - 1.0).abs() < 1e-9, "alpha={a}: {c} vs {o}");
    }
    assert!(c_alpha(alpha(2.0)).is_err());
}

#[test]
fn gaussian_case_has_variance_two() {
    let mut rng = RngSpec::new(11, 0).rng();
    let n = 400_000;
    let s2: f64 = (0..n).map(|_| sample_sas(alpha(2.0), &mut rng).powi(2)).sum::<f64>() / n as f64;
    // sd of the mean of X² is √(2·4/n)
    assert!((s2 - 2.0).abs() < 4.0 * (8.0 / n as f64).sqrt(), "{s2}");
}

#[test]
fn cauchy_half_mass_in_unit_interval() {
    let mut rng = RngSpec::new(12, 0).rng();
    let n = 400_000;
    let hits = (0..n).filter(|_| sample_sas(alpha(1.0), &mut rng).abs() < 1.0).count();
    let p = hits as f64 / n as f64;
    assert!((p - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt(), "{p}");
}

#[test]
fn characteristic_function_on_alpha_grid() {
    for (k, a) in [0.5, 1.0, 1.2, 1.5, 1.8, 2.0].into_iter().enumerate() {
        let mut rng = RngSpec::new(13, k as u64).rng();
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_sas(alpha(a), &mut rng)).collect();
        for lam in [0.5, 1.0, 2.0] {
            let c: Vec<f64> = xs.iter().map(|x| (lam * x).cos()).collect();
            let m = c.iter().sum::<f64>() / n as f64;
            let v = c.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            let want = (-f64::powf(lam, a)).exp();
            assert!((m - want).abs() < 3.5 * (v / n as f64).sqrt(), "alpha={a} lambda={lam}: {m} vs {want}");
        }
    }
}

#[test]
fn stable_tail_constant() {
    // P(X > t) = Γ(α) sin(πα/2)/π t^{-α} + O(t^{-2α}); at α = 1.5 the second
    // term of the series is t^{-3}/π
    let lead = 0.886_226_925_452_758 * (0.75 * PI).sin() / PI;
    let mut rng = RngSpec::new(14, 0).rng();
    let n = 10_000_000u64;
    let (mut c20, mut c50) = (0u64, 0u64);
    for _ in 0..n {
        let x = sample_sas(alpha(1.5), &mut rng);
        c20 += (x > 20.0) as u64;
        c50 += (x > 50.0) as u64;
    }
    for (t, c) in [(20.0f64, c20), (50.0, c50)] {
        let want = lead * t.powf(-1.5) + t.powi(-3) / PI;
        let p = c as f64 / n as f64;
        let se = (want / n as f64).sqrt();
        assert!((p - want).abs() < 3.5 * se, "t={t}: {p} vs {want}");
        assert!((p * t.powf(1.5) / lead - 1.0).abs() < 0.06);
    }
}

#[test]
fn median_is_symmetric() {
    for (k, a) in [0.5, 1.0, 1.2, 1.5, 1.8, 2.0].into_iter().enumerate() {
        let mut rng = RngSpec::new(15, k as u64).rng();
        let mut xs: Vec<f64> = (0..1_000_000).map(|_| sample_sas(alpha(a), &mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len();
        let med = 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
        let iqr = xs[3 * n / 4] - xs[n / 4];
        assert!(med.abs() < 4e-3 * iqr, "alpha={a}: median {med}, iqr {iqr}");
    }
}

#[test]
fn arrivals_increase_and_scale() {
    let mut rng = RngSpec::new(16, 0).rng();
    let one = gamma_arrivals(1, &mut rng);
    assert!(one.len() == 1 && one[0] > 0.0);
    let g = gamma_arrivals(100_000, &mut rng);
    assert!(g.windows(2).all(|w| w[1] > w[0]));
    assert!((g[99_999] / 1e5 - 1.0).abs() < 0.02);
}

#[test]
fn arrivals_normalised_stay_bounded() {
    let j = 100_000;
    let good = (0..100)
        .filter(|&s| {
            let g = gamma_arrivals(j, &mut RngSpec::new(1000 + s, 0).rng());
            let worst = (1_000..=j).map(|i| (g[i - 1] / i as f64 - 1.0).abs()).fold(0.0, f64::max);
            worst < 0.15
        })
        .count();
    assert!(good >= 99, "{good}");
}

#[test]
fn site_frequencies() {
    let atom = MeasureOnN::atom();
    let mut rng = RngSpec::new(17, 0).rng();
    assert_eq!(sample_sites(SiteLaw::Discrete(&atom), 50, &mut rng).unwrap(), Sites::Atoms(vec![1; 50]));

    let two = MeasureOnN::uniform(2).unwrap();
    let n = 1_000_000;
    let Sites::Atoms(v) = sample_sites(SiteLaw::Discrete(&two), n, &mut rng).unwrap() else { panic!() };
    let f = v.iter().filter(|&&k| k == 1).count() as f64 / n as f64;
    assert!((f - 0.5).abs() < 0.002, "{f}");

    let Sites::Points { coords, .. } = sample_sites(SiteLaw::UnitCube { dim: 1 }, n, &mut rng).unwrap() else {
        panic!()
    };
    let f = coords.iter().filter(|&&x| x <= 0.5).count() as f64 / n as f64;
    assert!((f - 0.5).abs() < 3e-3, "{f}");
    assert!(MeasureOnN::from_weights(vec![0.0]).is_err());
}

#[test]
fn replay_is_pure() {
    let spec = RngSpec::new(99, 7);
    let a: Vec<f64> = {
        let mut r = spec.rng();
        (0..100).map(|_| sample_sas(alpha(1.3), &mut r)).collect()
    };
    let b: Vec<f64> = {
        let mut r = spec.rng();
        (0..100).map(|_| sample_sas(alpha(1.3), &mut r)).collect()
    };
    assert_eq!(a, b);
}
