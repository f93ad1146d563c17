use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::diagonal::RandomDiagonal;
use crate::error::{invalid, Error, Result};
use crate::measure::{log_decay_exponent, GapTarget, MeasureOnN};
use crate::process::ThetaSeq;
use crate::special::log_guard;
use crate::stable::StableIndex;

/// Diagonal `(ϑ_n)` acting from `ℓ_p` to `ℓ_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSpec {
    pub theta: ThetaSeq,
    /// Source exponent, `p ≥ 1` (may be infinite).
    pub p: f64,
    /// Target exponent, `q > 0`.
    pub q: f64,
}

impl DiagonalSpec {
    /// `ϑ_n = σ_n^{1/α}` of a measure, target `ℓ_α`.
    pub fn from_measure(measure: &MeasureOnN, alpha: StableIndex, p: f64) -> Self {
        let a = alpha.value();
        Self { theta: ThetaSeq::Explicit(measure.weights().iter().map(|w| w.powf(1.0 / a)).collect()), p, q: a }
    }

    fn check(&self) -> Result<()> {
        if !(self.p >= 1.0) {
            return invalid("p", "source exponent must be >= 1");
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return invalid("q", "target exponent must be positive");
        }
        self.theta.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub n: Vec<usize>,
    pub e: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapCurve {
    pub n: Vec<usize>,
    pub gap: Vec<f64>,
}

/// Outcome of the regular-decay check on a sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularity {
    /// Global log-log decay exponent over the checked range.
    pub decay: f64,
    /// Exponent used in `sup_{n≥k} (n/k)^a v_n / v_k`.
    pub witness: f64,
    /// That supremum on the dyadic grid.
    pub sup_ratio: f64,
    /// `max v_n / v_{2n}` on the dyadic grid.
    pub doubling: f64,
}

const SUP_BOUND: f64 = 100.0;
const DOUBLING_BOUND: f64 = 256.0;

/// Checks `sup_{n≥k} (n/k)^a v_n/v_k < ∞` for some `a > threshold`, and
/// `v_n ≈ v_{2n}`, on the dyadic points of `v_1..=v_N`.
///
/// The witness `a` is the midpoint between `threshold` and the observed decay
/// exponent; the supremum must stay below 100 and the doubling ratio below 256.
pub fn check_regularity(v: &[f64], threshold: f64) -> Result<Regularity> {
    let n = v.len();
    if n < 8 {
        return invalid("n_grid", "need at least 8 terms to check regularity");
    }
    if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::Regularity("sequence must stay positive and finite".into()));
    }
    let decay = -(v[n - 1].ln() - v[0].ln()) / (n as f64).ln();
    if !(decay > threshold) || !(decay > 0.0) {
        return Err(Error::Regularity(format!(
            "decay exponent {decay:.4} does not exceed the required {threshold:.4} (sequence not tending to 0 fast enough)"
        )));
    }
    let witness = 0.5 * (threshold.max(0.0) + decay);
    let pts: Vec<usize> = core::iter::successors(Some(1usize), |k| Some(k * 2)).take_while(|k| *k <= n).collect();
    let mut sup_ratio: f64 = 1.0;
    let mut doubling: f64 = 1.0;
    for (i, &k) in pts.iter().enumerate() {
        for &m in &pts[i..] {
            sup_ratio = sup_ratio.max((m as f64 / k as f64).powf(witness) * v[m - 1] / v[k - 1]);
        }
        if 2 * k <= n {
            doubling = doubling.max(v[k - 1] / v[2 * k - 1]);
        }
    }
    if sup_ratio > SUP_BOUND {
        return Err(Error::Regularity(format!("sup (n/k)^a v_n/v_k = {sup_ratio:.3e} at a = {witness:.4}")));
    }
    if doubling > DOUBLING_BOUND {
        return Err(Error::Regularity(format!("v_n/v_(2n) reaches {doubling:.3e}")));
    }
    Ok(Regularity { decay, witness, sup_ratio, doubling })
}

fn check_grid(n_grid: &[usize]) -> Result<usize> {
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("n_grid", "must be strictly increasing positive integers");
    }
    Ok(*n_grid.last().unwrap())
}

fn theta_values(theta: &ThetaSeq, n: usize) -> Result<Vec<f64>> {
    if let Some(len) = theta.explicit_len() {
        if n > len {
            return Err(Error::OutOfRange(format!("n = {n} beyond the {len} listed coefficients")));
        }
    }
    Ok(theta.values(n))
}

/// `e_n ≈ ϑ_n n^{1/q - 1/p}` (constants set to one), reported as its
/// nonincreasing envelope over `n_grid`.
pub fn kuhn_entropy(spec: &DiagonalSpec, n_grid: &[usize]) -> Result<EntropyCurve> {
    spec.check()?;
    let n_max = check_grid(n_grid)?.max(8);
    let th = theta_values(&spec.theta, n_max)?;
    let expo = 1.0 / spec.q - 1.0 / spec.p;
    check_regularity(&th, expo.max(0.0))?;
    let mut e = Vec::with_capacity(n_grid.len());
    let mut env = f64::INFINITY;
    for &n in n_grid {
        env = env.min(th[n - 1] * (n as f64).powf(expo));
        e.push(env);
    }
    Ok(EntropyCurve { n: n_grid.to_vec(), e })
}

/// Disjoint intervals `|A_n| = c d_n^{-α}/n` and the entropy surrogates of the
/// diagonal operator into `L_α` and `L_∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalAllocation {
    pub c: f64,
    pub sizes: Vec<f64>,
    /// `ϑ_n n^{1/α-1/p}`.
    pub e_u: Vec<f64>,
    /// `ϑ_n |A_n|^{-1/α} n^{-1/p}`.
    pub e_u_inf: Vec<f64>,
    /// `|A_n|^{-1/α}/n^{1/α} = c^{-1/α} d_n`.
    pub gap_bound: Vec<f64>,
}

/// Needs `Σ d_n^{-α}/n < ∞`; `c` is set from the partial sum plus an
/// integral estimate of the rest, so the intervals fit in `[0,1]`.
pub fn interval_allocation(
    target: &GapTarget,
    theta: &ThetaSeq,
    alpha: StableIndex,
    p: f64,
    n_max: usize,
) -> Result<IntervalAllocation> {
    let a = alpha.value();
    if !(p >= 1.0) {
        return invalid("p", "source exponent must be >= 1");
    }
    if n_max < 20 {
        return invalid("n_max", "horizon too short");
    }
    theta.validate()?;
    let d = target.values(n_max)?;
    let gamma = log_decay_exponent(&d, a);
    if !(gamma > 1.0 + 1e-9) {
        return Err(Error::Regularity(format!(
            "sum of d_n^(-alpha)/n diverges (log-decay exponent {gamma:.4} <= 1); intervals cannot fit in [0,1]"
        )));
    }
    let rates: Vec<f64> = d.iter().enumerate().map(|(i, x)| x.powf(-a) / (i + 1) as f64).collect();
    let partial: f64 = rates.iter().sum();
    let rest = d[n_max - 1].powf(-a) * log_guard(n_max as f64) / (gamma - 1.0);
    let c = 1.0 / (partial + rest);
    let th = theta_values(theta, n_max)?;
    check_regularity(&th, (1.0 / a - 1.0 / p).max(0.0))?;
    let sizes: Vec<f64> = rates.iter().map(|r| c * r).collect();
    let inv_p = 1.0 / p;
    let mut e_u = Vec::with_capacity(n_max);
    let mut e_u_inf = Vec::with_capacity(n_max);
    let mut gap_bound = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let nf = n as f64;
        let size = sizes[n - 1];
        e_u.push(th[n - 1] * nf.powf(1.0 / a - inv_p));
        e_u_inf.push(th[n - 1] * size.powf(-1.0 / a) * nf.powf(-inv_p));
        gap_bound.push(size.powf(-1.0 / a) / nf.powf(1.0 / a));
    }
    let scaled: Vec<f64> = (0..n_max).map(|i| th[i] * sizes[i].powf(-1.0 / a)).collect();
    check_regularity(&scaled, 0.0)?;
    Ok(IntervalAllocation { c, sizes, e_u, e_u_inf, gap_bound })
}

/// `G_n = e_n(v) / (n^{1/2-1/α} e_n(u))` with `e_n(v) = λ*_n n^{1/2-1/p}` and
/// `e_n(u) = ϑ_n n^{1/α-1/p}`; the powers of `n` cancel to `λ*_n/ϑ_n`.
pub fn gap_curve(spec: &DiagonalSpec, diag: &RandomDiagonal, alpha: StableIndex, n_grid: &[usize]) -> Result<GapCurve> {
    let n_max = check_grid(n_grid)?;
    if n_max > diag.occupied() {
        return Err(Error::OutOfRange(format!("n = {n_max} beyond N_J = {}", diag.occupied())));
    }
    let th = theta_values(&spec.theta, n_max)?;
    let a = alpha.value();
    let inv_p = 1.0 / spec.p;
    let mut gap = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let nf = n as f64;
        let ev = diag.lambda_star[n - 1] * nf.powf(0.5 - inv_p);
        let eu = th[n - 1] * nf.powf(1.0 / a - inv_p);
        let g = ev / (nf.powf(0.5 - 1.0 / a) * eu);
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::OutOfRange(format!("gap undefined at n = {n}")));
        }
        gap.push(g);
    }
    Ok(GapCurve { n: n_grid.to_vec(), gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_entropy() {
        let spec = DiagonalSpec { theta: ThetaSeq::Polynomial { exponent: 1.5 }, p: 2.0, q: 1.0 };
        let grid: Vec<usize> = (1..=200).collect();
        let c = kuhn_entropy(&spec, &grid).unwrap();
        for (n, e) in c.n.iter().zip(&c.e) {
            let expect = (*n as f64).powf(-1.5 + 1.0 - 0.5);
            assert!((e / expect - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_theta_rejected() {
        let spec = DiagonalSpec { theta: ThetaSeq::Explicit(alloc::vec![1.0; 100]), p: 2.0, q: 1.0 };
        assert!(matches!(kuhn_entropy(&spec, &[1, 10, 50]), Err(Error::Regularity(_))));
        // decay too slow for the target exponent
        let spec = DiagonalSpec { theta: ThetaSeq::Polynomial { exponent: 0.3 }, p: 2.0, q: 1.0 };
        assert!(kuhn_entropy(&spec, &[1, 10, 50]).is_err());
        // geometric decay breaks doubling regularity
        let spec = DiagonalSpec { theta: ThetaSeq::PowerLog { gamma: 1.0, beta: 0.0 }, p: 2.0, q: 1.0 };
        assert!(kuhn_entropy(&spec, &[1, 10, 50]).is_err());
    }

    #[test]
    fn interval_allocation_examples() {
        let a = StableIndex::new(1.0).unwrap();
        let th = ThetaSeq::Polynomial { exponent: 2.0 };
        assert!(interval_allocation(&GapTarget::Constant { value: 1.0 }, &th, a, 2.0, 1000).is_err());
        let t = GapTarget::LogPower { exponent: 2.0 };
        let r = interval_allocation(&t, &th, a, 2.0, 100_000).unwrap();
        assert!(r.sizes.iter().sum::<f64>() <= 1.0);
        for n in [10usize, 1000, 100_000] {
            let ratio = r.gap_bound[n - 1] / log_guard(n as f64).powi(2);
            assert!((ratio - 1.0 / r.c).abs() < 1e-9 / r.c);
        }
    }

    #[test]
    fn gap_cancels() {
        let a = StableIndex::new(1.5).unwrap();
        let th: Vec<f64> = (1..=50).map(|n| (n as f64).powf(-1.2)).collect();
        let diag = RandomDiagonal::from_values(th.iter().enumerate().map(|(i, v)| (i + 1, *v)).collect(), 1000);
        let spec = DiagonalSpec { theta: ThetaSeq::Explicit(th), p: 2.0, q: 1.5 };
        let g = gap_curve(&spec, &diag, a, &[1, 5, 20, 50]).unwrap();
        assert!(g.gap.iter().all(|x| (x - 1.0).abs() < 1e-12));
        assert!(gap_curve(&spec, &diag, a, &[1, 51]).is_err());
    }
}
