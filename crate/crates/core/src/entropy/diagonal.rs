use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::measure::MeasureOnN;
use crate::regression::{fit_log_law, RateFit};
use crate::special::{log_guard, NeumaierSum};
use crate::stable::StableIndex;
use crate::RngSpec;

/// `λ_k = (Σ_{j≤J, V_j=k} j^{-2/α})^{1/2}` for i.i.d. sites `V_j ~ σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomDiagonal {
    /// `(k, λ_k)` for every occupied atom, by ascending `k`.
    pub lambda: Vec<(usize, f64)>,
    /// Occupied values in nonincreasing order, ties by ascending `k`.
    pub lambda_star: Vec<f64>,
    /// Number of series indices `J`.
    pub terms: usize,
    /// `(m, N_m)` at the requested prefixes, ascending in `m`.
    pub distinct: Vec<(usize, usize)>,
    /// `Σ_{j≤J} j^{-2/α}`, compensated.
    pub total_mass: f64,
}

impl RandomDiagonal {
    /// Builds the record from raw values (no sampling); used for synthetic checks.
    pub fn from_values(lambda: Vec<(usize, f64)>, terms: usize) -> Self {
        let mut lambda = lambda;
        lambda.sort_by_key(|x| x.0);
        let lambda_star = rearrange(&lambda);
        let total_mass = lambda.iter().map(|x| x.1 * x.1).sum();
        let n = lambda.len();
        Self { lambda, lambda_star, terms, distinct: alloc::vec![(terms, n)], total_mass }
    }

    /// `N_m` at a recorded prefix.
    pub fn distinct_at(&self, m: usize) -> Option<usize> {
        self.distinct.iter().find(|x| x.0 == m).map(|x| x.1)
    }

    /// Number of occupied atoms `N_J`; ranks beyond carry `λ* = 0`.
    pub fn occupied(&self) -> usize {
        self.lambda_star.len()
    }

    /// Ranks fixed by atoms hit among the first `J/8` indices, `N_{⌊J/8⌋}`:
    /// the part of `λ*` that further series indices barely move.
    pub fn resolved_rank(&self) -> usize {
        self.distinct_at(self.terms / 8).unwrap_or(self.occupied())
    }
}

fn rearrange(lambda: &[(usize, f64)]) -> Vec<f64> {
    let mut v: Vec<(usize, f64)> = lambda.to_vec();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    v.into_iter().map(|x| x.1).collect()
}

/// Samples the random diagonal with `terms` series indices, recording `N_m`
/// at every requested prefix (plus `⌊J/8⌋` and `J`).
pub fn random_diagonal<R: Rng + ?Sized>(
    measure: &MeasureOnN,
    terms: usize,
    alpha: StableIndex,
    prefixes: &[usize],
    rng: &mut R,
) -> Result<RandomDiagonal> {
    let alpha = alpha.require_stable()?;
    if terms < 1000 {
        return invalid("terms", "need J >= 1000");
    }
    let mut checkpoints: Vec<usize> = prefixes.iter().copied().filter(|m| *m >= 1 && *m <= terms).collect();
    if prefixes.iter().any(|m| *m == 0 || *m > terms) {
        return invalid("prefixes", "every m must satisfy 1 <= m <= J");
    }
    checkpoints.push(terms / 8);
    checkpoints.push(terms);
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let s = 2.0 / alpha.value();
    let k = measure.horizon();
    let mut acc = alloc::vec![0.0f64; k];
    let mut overflow: Vec<(usize, f64)> = Vec::new();
    let mut occupied = 0usize;
    let mut distinct = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let mut total = NeumaierSum::new();
    for j in 1..=terms {
        let w = if s == 2.0 { 1.0 / ((j as f64) * (j as f64)) } else { (j as f64).powf(-s) };
        total.add(w);
        match measure.sample(rng) {
            Some(site) => {
                let a = &mut acc[site - 1];
                if *a == 0.0 {
                    occupied += 1;
                }
                *a += w;
            }
            None => {
                overflow.push((k + j, w));
                occupied += 1;
            }
        }
        if checkpoints[next] == j {
            distinct.push((j, occupied));
            next += 1;
            if next == checkpoints.len() {
                next -= 1;
            }
        }
    }
    let mut lambda: Vec<(usize, f64)> =
        acc.iter().enumerate().filter(|(_, a)| **a > 0.0).map(|(i, a)| (i + 1, a.sqrt())).collect();
    lambda.extend(overflow.into_iter().map(|(i, a)| (i, a.sqrt())));
    let lambda_star = rearrange(&lambda);
    Ok(RandomDiagonal { lambda, lambda_star, terms, distinct, total_mass: total.value() })
}

/// `E N_m` split into the part over the horizon and the bound `m T_{K+1}` for
/// atoms beyond it (which is also the exact contribution when every draw past
/// the horizon lands on a fresh atom).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedDistinct {
    pub within_horizon: f64,
    pub beyond_horizon: f64,
}

impl ExpectedDistinct {
    pub fn total(&self) -> f64 {
        self.within_horizon + self.beyond_horizon
    }
}

/// `E N_m = Σ_k 1 - (1-σ_k)^m`.
pub fn expected_distinct(measure: &MeasureOnN, m: u64) -> Result<ExpectedDistinct> {
    if m == 0 {
        return invalid("m", "need m >= 1");
    }
    let mf = m as f64;
    let mut s = NeumaierSum::new();
    for &w in measure.weights() {
        if w > 0.0 {
            s.add(-(mf * (-w).ln_1p()).exp_m1());
        }
    }
    Ok(ExpectedDistinct { within_horizon: s.value(), beyond_horizon: mf * measure.truncated_mass() })
}

/// Reusable scratch for counting distinct atoms among repeated draws.
#[derive(Debug, Clone)]
pub struct DistinctCounter {
    stamp: Vec<u32>,
    generation: u32,
}

impl DistinctCounter {
    pub fn new(measure: &MeasureOnN) -> Self {
        Self { stamp: alloc::vec![0; measure.horizon()], generation: 0 }
    }

    /// `N_m` for one batch of `m` draws.
    pub fn count<R: Rng + ?Sized>(&mut self, measure: &MeasureOnN, m: usize, rng: &mut R) -> usize {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let mut n = 0;
        for _ in 0..m {
            match measure.sample(rng) {
                Some(site) => {
                    let st = &mut self.stamp[site - 1];
                    if *st != self.generation {
                        *st = self.generation;
                        n += 1;
                    }
                }
                None => n += 1,
            }
        }
        n
    }
}

/// Replicate `r` of `N_m` draws from `spec.trial(r)`.
pub fn distinct_count_mc(measure: &MeasureOnN, m: usize, replications: usize, spec: RngSpec) -> Result<Vec<usize>> {
    if m == 0 {
        return invalid("m", "need m >= 1");
    }
    if (m as f64) * (replications as f64) > 1e11 {
        return Err(Error::Budget("m * replications exceeds 1e11 draws".into()));
    }
    let mut c = DistinctCounter::new(measure);
    Ok((0..replications).map(|r| c.count(measure, m, &mut spec.trial(r as u64).rng())).collect())
}

/// Least squares of `log v_k` on `log k` (and `log log(k+2)`) over the dense
/// index range `lo..=hi` of a 1-based sequence.
pub fn fit_sequence(values: &[f64], lo: usize, hi: usize, with_log_factor: bool) -> Result<RateFit> {
    if lo < 1 || hi < lo || hi > values.len() {
        return invalid("k_range", alloc::format!("{lo}..={hi} outside 1..={}", values.len()));
    }
    if hi - lo + 1 < 4 {
        return Err(Error::TooFewPoints { usable: hi - lo + 1, needed: 4 });
    }
    if values[lo - 1..hi].iter().any(|v| !(*v > 0.0)) {
        return Err(Error::OutOfRange("k range reaches zero values".into()));
    }
    let x: Vec<f64> = (lo..=hi).map(|k| (k as f64).ln()).collect();
    let y: Vec<f64> = values[lo - 1..hi].iter().map(|v| v.ln()).collect();
    let w = alloc::vec![1.0; x.len()];
    if with_log_factor {
        let z: Vec<f64> = (lo..=hi).map(|k| log_guard(k as f64).ln()).collect();
        fit_log_law(&x, Some(&z), &y, &w)
    } else {
        fit_log_law(&x, None, &y, &w)
    }
}

/// Power/log-power fit of `λ*_k` over `lo..=hi`, which must stay inside the
/// occupied ranks.
pub fn fit_rearrangement(diag: &RandomDiagonal, lo: usize, hi: usize, with_log_factor: bool) -> Result<RateFit> {
    if hi > diag.occupied() {
        return Err(Error::OutOfRange(alloc::format!("k = {hi} beyond the {} occupied ranks", diag.occupied())));
    }
    fit_sequence(&diag.lambda_star, lo, hi, with_log_factor)
}
