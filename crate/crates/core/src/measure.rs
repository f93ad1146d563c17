//! Probability measures on ℕ with a finite storage horizon.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Open01};

use crate::error::{invalid, Result};
use crate::special::{log_guard, sum_compensated};

/// Weights `σ_1, …, σ_K` of a probability measure on ℕ plus the mass
/// `T_{K+1}` it puts beyond the horizon `K`.
///
/// Tails `T_n = Σ_{k≥n} σ_k` are stored for `n = 1..=K+1` with `T_1 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureOnN {
    weights: Vec<f64>,
    tails: Vec<f64>,
}

/// The two families of regularly decaying measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureCase {
    /// `σ_k ∝ k^{-1} log(k+2)^{-ν}`, `ν > 1`.
    A { nu: f64 },
    /// `σ_k ∝ k^{-a} log(k+2)^{-ν}`, `a > 1`.
    B { a: f64, nu: f64 },
}

impl MeasureOnN {
    /// Normalises raw weights, treating `raw_tail` as mass beyond the last one.
    pub fn with_tail(raw: Vec<f64>, raw_tail: f64) -> Result<Self> {
        if raw.is_empty() {
            return invalid("weights", "empty weight list");
        }
        if raw.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || !(raw_tail.is_finite() && raw_tail >= 0.0) {
            return invalid("weights", "weights must be finite and nonnegative");
        }
        let total = sum_compensated(raw.iter().copied()) + raw_tail;
        if total <= 0.0 {
            return invalid("weights", "measure has zero total mass");
        }
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let k = weights.len();
        let mut tails = alloc::vec![0.0; k + 1];
        tails[k] = raw_tail / total;
        for n in (0..k).rev() {
            tails[n] = tails[n + 1] + weights[n];
        }
        tails[0] = 1.0;
        Ok(Self { weights, tails })
    }

    pub fn from_weights(raw: Vec<f64>) -> Result<Self> {
        Self::with_tail(raw, 0.0)
    }

    /// Point mass at 1.
    pub fn atom() -> Self {
        Self::from_weights(alloc::vec![1.0]).expect("unit atom")
    }

    /// Uniform on `{1, …, n}`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(alloc::vec![1.0; n])
    }

    pub fn from_case(case: MeasureCase, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return invalid("k_max", "horizon must be positive");
        }
        let end = k_max as f64 + 0.5;
        match case {
            MeasureCase::A { nu } => {
                if !(nu > 1.0 && nu.is_finite()) {
                    return invalid("nu", format!("case (a) needs nu > 1, got {nu}"));
                }
                let raw = (1..=k_max).map(|k| 1.0 / (k as f64 * log_guard(k as f64).powf(nu))).collect();
                let tail = log_guard(end).powf(1.0 - nu) / (nu - 1.0);
                Self::with_tail(raw, tail)
            }
            MeasureCase::B { a, nu } => {
                if !(a > 1.0 && a.is_finite()) {
                    return invalid("a", format!("case (b) needs a > 1, got {a}"));
                }
                if !nu.is_finite() {
                    return invalid("nu", "must be finite");
                }
                let raw = (1..=k_max)
                    .map(|k| (k as f64).powf(-a) * log_guard(k as f64).powf(-nu))
                    .collect();
                let tail = end.powf(1.0 - a) * log_guard(end).powf(-nu) / (a - 1.0);
                Self::with_tail(raw, tail)
            }
        }
    }

    /// Number of stored atoms `K`.
    pub fn horizon(&self) -> usize {
        self.weights.len()
    }

    /// `σ_k` for `1 ≤ k ≤ K`, zero otherwise.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k > self.weights.len() {
            0.0
        } else {
            self.weights[k - 1]
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `T_n` for `1 ≤ n ≤ K+1`.
    pub fn tail(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.tails.len(), "tail index {n} outside 1..={}", self.tails.len());
        self.tails[n - 1]
    }

    pub fn tails(&self) -> &[f64] {
        &self.tails
    }

    /// Mass beyond the horizon, `T_{K+1}`.
    pub fn truncated_mass(&self) -> f64 {
        self.tails[self.weights.len()]
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.weights.windows(2).all(|w| w[1] <= w[0])
    }

    /// Inverse-CDF draw on the tails. `None` means a draw beyond the horizon.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let u: f64 = Open01.sample(rng);
        self.locate(u)
    }

    /// Atom `n` with `T_{n+1} < u ≤ T_n`.
    pub fn locate(&self, u: f64) -> Option<usize> {
        let n = self.tails.partition_point(|&t| t >= u);
        if n > self.weights.len() {
            None
        } else {
            Some(n.max(1))
        }
    }
}

/// Target gap sequence `d_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum GapTarget {
    /// `d_k = log(k+2)^exponent`.
    LogPower { exponent: f64 },
    /// `d_k ≡ value`.
    Constant { value: f64 },
    /// Listed values `d_1, d_2, …`.
    Explicit(Vec<f64>),
}

impl GapTarget {
    /// `d_1..=d_n`.
    pub fn values(&self, n: usize) -> Result<Vec<f64>> {
        let v: Vec<f64> = match self {
            GapTarget::LogPower { exponent } => (1..=n).map(|k| log_guard(k as f64).powf(*exponent)).collect(),
            GapTarget::Constant { value } => alloc::vec![*value; n],
            GapTarget::Explicit(d) => {
                if d.len() < n {
                    return invalid("d", format!("{} values listed, {n} needed", d.len()));
                }
                d[..n].to_vec()
            }
        };
        if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return invalid("d", "values must be finite and positive");
        }
        Ok(v)
    }
}

/// Local exponent `γ` in `d_k^{-α} ≈ log(k+2)^{-γ}` over the last decade of
/// `d`; `Σ d_k^{-α}/k` diverges iff `γ ≤ 1`.
pub fn log_decay_exponent(d: &[f64], alpha: f64) -> f64 {
    let n = d.len();
    let m = (n / 10).max(1);
    let num = d[n - 1].ln() - d[m - 1].ln();
    let den = log_guard(n as f64).ln() - log_guard(m as f64).ln();
    alpha * num / den
}

const DIVERGENCE_SLACK: f64 = 1e-9;

/// `a_k = d_k^{-α}/k` for `k = 1..=n`.
pub fn gap_rates(d: &[f64], alpha: f64) -> Vec<f64> {
    d.iter().enumerate().map(|(i, dk)| dk.powf(-alpha) / (i + 1) as f64).collect()
}

/// Checks on `d`: monotone, doubling-regular, above the `log^{1/(2α)}` floor.
fn check_gap_target(d: &[f64], alpha: f64) -> Result<()> {
    if d.windows(2).any(|w| w[1] < w[0]) {
        return Err(crate::Error::Regularity("d must be nondecreasing".into()));
    }
    for n in 1..=d.len() / 2 {
        let r = d[2 * n - 1] / d[n - 1];
        if !(0.25..=4.0).contains(&r) {
            return Err(crate::Error::Regularity(format!("d_(2n)/d_n = {r} at n = {n}")));
        }
    }
    let floor = |k: usize| d[k - 1] / log_guard(k as f64).powf(0.5 / alpha);
    let start = floor(1);
    let worst = (1..=d.len()).map(floor).fold(f64::INFINITY, f64::min);
    if worst < 0.5 * start {
        return Err(crate::Error::Regularity(format!(
            "d falls below the log(k)^(1/(2 alpha)) floor: ratio {worst:.4} vs {start:.4} at k = 1"
        )));
    }
    Ok(())
}

/// `σ_k ∝ a_{k+1} exp(-A_k)` with `a_k = d_k^{-α}/k`, `A_k = Σ_{i≤k} a_i`.
///
/// Requires `Σ a_k = ∞` (checked through the log-decay exponent of `d`) and
/// `d_k ⪰ log(k+2)^{1/(2α)}`. Mass beyond the horizon is `exp(-A_{K+1})`.
pub fn measure_from_gap_target(target: &GapTarget, alpha: f64, k_max: usize) -> Result<MeasureOnN> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return invalid("alpha", "must lie in (0, 2)");
    }
    if k_max < 20 {
        return invalid("k_max", "horizon too short to check the target");
    }
    let d = target.values(k_max + 1)?;
    check_gap_target(&d, alpha)?;
    let gamma = log_decay_exponent(&d, alpha);
    if gamma > 1.0 + DIVERGENCE_SLACK {
        return Err(crate::Error::Regularity(format!(
            "sum of d_k^(-alpha)/k converges (log-decay exponent {gamma:.4} > 1)"
        )));
    }
    let a = gap_rates(&d, alpha);
    let mut big_a = 0.0;
    let mut raw = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        big_a += a[k - 1];
        raw.push(a[k] * (-big_a).exp());
    }
    big_a += a[k_max];
    let m = MeasureOnN::with_tail(raw, (-big_a).exp())?;
    if !m.is_nonincreasing() {
        return Err(crate::Error::Regularity("constructed weights are not monotone".into()));
    }
    Ok(m)
}

/// `max |σ_n / (T_n a_{n+1}) - 1|` over `n ∈ [lo, hi]`.
pub fn tail_identity_error(m: &MeasureOnN, target: &GapTarget, alpha: f64, lo: usize, hi: usize) -> Result<f64> {
    if lo < 1 || hi < lo || hi > m.horizon() {
        return invalid("range", "must satisfy 1 <= lo <= hi <= horizon");
    }
    let d = target.values(hi + 1)?;
    let a = gap_rates(&d, alpha);
    Ok((lo..=hi).map(|n| (m.weight(n) / (m.tail(n) * a[n]) - 1.0).abs()).fold(0.0, f64::max))
}
