//! Monte Carlo small-deviation curves `φ(ε) = -log P(‖X‖ < ε)` and their rates.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::process::{
    norm::norm_values, DiagonalVector, Grid, IncrementSampler, KernelSpec, LePageSampler, NormSpec, SumOfMaxima,
};
use crate::regression::{fit_log_law, RateFit};
use crate::stable::{sample_sas, LePageStream, StableIndex};
use crate::{RngSpec, StreamRng};

mod prediction;
pub use prediction::{holder_rate, predicted_rate, Bound, ExampleId, RatePrediction, ThetaPrediction};

/// Anything that produces one norm realisation per call.
pub trait NormSampler {
    fn sample_norm(&self, rng: &mut StreamRng) -> f64;
}

impl<F: Fn(&mut StreamRng) -> f64> NormSampler for F {
    fn sample_norm(&self, rng: &mut StreamRng) -> f64 {
        self(rng)
    }
}

/// `|ξ|` for a standard Gaussian ξ.
#[derive(Debug, Clone, Copy)]
pub struct AbsGaussian;

impl NormSampler for AbsGaussian {
    fn sample_norm(&self, rng: &mut StreamRng) -> f64 {
        let x: f64 = StandardNormal.sample(rng);
        x.abs()
    }
}

/// `|X|` for a standard SαS variate.
#[derive(Debug, Clone, Copy)]
pub struct AbsStable(pub StableIndex);

impl NormSampler for AbsStable {
    fn sample_norm(&self, rng: &mut StreamRng) -> f64 {
        sample_sas(self.0, rng).abs()
    }
}

/// Norm of a grid path from the increment sampler, optionally rescaled.
#[derive(Debug, Clone)]
pub struct IncrementNorm {
    sampler: IncrementSampler,
    norm: NormSpec,
    scale: f64,
}

impl IncrementNorm {
    pub fn new(kernel: &KernelSpec, alpha: StableIndex, grid: Grid, norm: NormSpec) -> Result<Self> {
        norm.check(&grid)?;
        Ok(Self { sampler: IncrementSampler::new(kernel, alpha, grid)?, norm, scale: 1.0 })
    }

    /// Multiplies every path by `scale` before taking the norm.
    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
}

impl NormSampler for IncrementNorm {
    fn sample_norm(&self, rng: &mut StreamRng) -> f64 {
        let mut noise = Vec::new();
        let mut out = Vec::new();
        self.sampler.sample_into(rng, &mut noise, &mut out);
        self.scale * norm_values(&out, &self.sampler.grid(), &self.norm)
    }
}

/// Norm of a LePage path with a fresh `terms`-long stream per call.
#[derive(Debug, Clone)]
pub struct LePageNorm {
    sampler: LePageSampler,
    grid: Grid,
    norm: NormSpec,
    terms: usize,
}

impl LePageNorm {
    pub fn new(kernel: &KernelSpec, alpha: StableIndex, grid: Grid, norm: NormSpec, terms: usize) -> Result<Self> {
        norm.check(&grid)?;
        if terms == 0 {
            return invalid("terms", "need at least one series term");
        }
        Ok(Self { sampler: LePageSampler::new(kernel, alpha, grid, true)?, grid, norm, terms })
    }
}

impl NormSampler for LePageNorm {
    fn sample_norm(&self, rng: &mut StreamRng) -> f64 {
        let stream = LePageStream::draw(self.sampler.site_law(), self.terms, rng).expect("terms checked");
        let p = self.sampler.sample(&stream, rng).expect("stream matches sampler");
        norm_values(&p.path.values, &self.grid, &self.norm)
    }
}

impl NormSampler for SumOfMaxima {
    fn sample_norm(&self, rng: &mut StreamRng) -> f64 {
        SumOfMaxima::sample_norm(self, rng)
    }
}

/// Diagonal vector under a norm on its index sequence.
#[derive(Debug, Clone)]
pub struct DiagonalNorm {
    vector: DiagonalVector,
    norm: NormSpec,
}

impl DiagonalNorm {
    pub fn new(vector: DiagonalVector, norm: NormSpec) -> Result<Self> {
        norm.check(&vector.grid())?;
        Ok(Self { vector, norm })
    }
}

impl NormSampler for DiagonalNorm {
    fn sample_norm(&self, rng: &mut StreamRng) -> f64 {
        let mut v = Vec::new();
        self.vector.sample_into(rng, &mut v);
        norm_values(&v, &self.vector.grid(), &self.norm)
    }
}

/// Validates a strictly decreasing positive ε grid.
pub fn check_eps_grid(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return invalid("eps", "empty grid");
    }
    if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return invalid("eps", "values must be positive and finite");
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("eps", "grid must be strictly decreasing");
    }
    Ok(())
}

/// `start, start·ratio, …` down to `stop` inclusive.
pub fn geometric_grid(start: f64, stop: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return invalid("ratio", "must lie in (0, 1)");
    }
    if !(start > stop && stop > 0.0 && start.is_finite()) {
        return invalid("eps", "need start > stop > 0");
    }
    let mut v = Vec::new();
    let mut e = start;
    while e >= stop * (1.0 - 1e-12) {
        v.push(e);
        e *= ratio;
    }
    Ok(v)
}

/// Geometric grid from the empirical `p_high` quantile of `norms` down to its
/// `p_low` quantile.
pub fn quantile_grid(norms: &[f64], ratio: f64, p_high: f64, p_low: f64) -> Result<Vec<f64>> {
    if !(0.0 < p_low && p_low < p_high && p_high < 1.0) {
        return invalid("eps", "need 0 < p_low < p_high < 1");
    }
    if norms.is_empty() {
        return invalid("eps", "no samples to place the grid");
    }
    let mut s: Vec<f64> = norms.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| s[((p * s.len() as f64).ceil() as usize).clamp(1, s.len()) - 1];
    let top = q(p_high);
    let bottom = q(p_low);
    if !(bottom > 0.0) || top <= bottom {
        return invalid("eps", format!("degenerate norm quantiles {bottom} .. {top}"));
    }
    geometric_grid(top, bottom, ratio)
}

/// Order-independent accumulator of hit counts on a shared ε grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitCounter {
    eps: Vec<u64>,
    buckets: Vec<u64>,
    trials: u64,
}

impl HitCounter {
    pub fn new(eps: &[f64]) -> Result<Self> {
        check_eps_grid(eps)?;
        Ok(Self { eps: eps.iter().map(|e| e.to_bits()).collect(), buckets: alloc::vec![0; eps.len() + 1], trials: 0 })
    }

    /// Counts one trial with norm `x` against every ε at once.
    pub fn record(&mut self, x: f64) {
        let above = self.eps.partition_point(|&e| f64::from_bits(e) > x);
        self.buckets[above] += 1;
        self.trials += 1;
    }

    pub fn merge(&mut self, other: &HitCounter) {
        assert_eq!(self.eps, other.eps, "merging counters on different grids");
        for (a, b) in self.buckets.iter_mut().zip(&other.buckets) {
            *a += b;
        }
        self.trials += other.trials;
    }

    pub fn finish(&self) -> SmallDevCurve {
        let m = self.eps.len();
        let mut hits = alloc::vec![0u64; m];
        let mut acc = 0;
        for i in (0..m).rev() {
            acc += self.buckets[i + 1];
            hits[i] = acc;
        }
        SmallDevCurve { eps: self.eps.iter().map(|b| f64::from_bits(*b)).collect(), hits, n_samples: self.trials }
    }
}

/// Hit counts `#{trials: ‖X‖ < ε}` on a decreasing ε grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallDevCurve {
    pub eps: Vec<f64>,
    pub hits: Vec<u64>,
    pub n_samples: u64,
}

impl SmallDevCurve {
    pub fn from_norms(norms: &[f64], eps: &[f64]) -> Result<Self> {
        let mut c = HitCounter::new(eps)?;
        for x in norms {
            c.record(*x);
        }
        Ok(c.finish())
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn censored(&self, i: usize) -> bool {
        self.hits[i] == 0
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.hits[i] as f64 / self.n_samples as f64
    }

    /// `-log(hits/n)`, `None` when censored.
    pub fn neg_log_p(&self, i: usize) -> Option<f64> {
        (!self.censored(i)).then(|| -self.probability(i).ln())
    }

    /// Delta-method standard error `sqrt((1-p)/(n p))` of `-log p`.
    pub fn stderr(&self, i: usize) -> Option<f64> {
        (!self.censored(i)).then(|| {
            let p = self.probability(i);
            ((1.0 - p) / (self.n_samples as f64 * p)).sqrt()
        })
    }

    /// Lower bound `log n` carried by censored points.
    pub fn censoring_bound(&self) -> f64 {
        (self.n_samples as f64).ln()
    }

    /// Indices with `0 < hits < n`, the only ones a log-scale fit can use.
    pub fn fittable(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.hits[i] > 0 && self.hits[i] < self.n_samples).collect()
    }

    /// Fewer than four usable points: the curve cannot be fitted.
    pub fn is_unusable(&self) -> bool {
        self.fittable().len() < 4
    }
}

/// Trial `i` of a run keyed by `spec` draws from `spec.trial(i)`.
pub fn trial_norm<S: NormSampler + ?Sized>(sampler: &S, spec: RngSpec, i: u64) -> f64 {
    sampler.sample_norm(&mut spec.trial(i).rng())
}

/// Shared-sample estimate of the small-deviation curve on `eps`.
pub fn estimate_small_dev<S: NormSampler + ?Sized>(
    sampler: &S,
    eps: &[f64],
    n_samples: u64,
    spec: RngSpec,
) -> Result<SmallDevCurve> {
    if n_samples < 1000 {
        return invalid("n_samples", "need at least 1000 trials");
    }
    let mut c = HitCounter::new(eps)?;
    for i in 0..n_samples {
        c.record(trial_norm(sampler, spec, i));
    }
    Ok(c.finish())
}

/// Regression of `log φ` on `log(1/ε)` (and `log log(1/ε)`), weighted by the
/// inverse delta-method variance `(φ/se)²` of `log φ`.
pub fn fit_rate(curve: &SmallDevCurve, with_log_factor: bool) -> Result<RateFit> {
    let idx = curve.fittable();
    let eps: Vec<f64> = idx.iter().map(|&i| curve.eps[i]).collect();
    let phi: Vec<f64> = idx.iter().map(|&i| curve.neg_log_p(i).unwrap()).collect();
    let se: Vec<f64> = idx.iter().map(|&i| curve.stderr(i).unwrap()).collect();
    fit_rate_points(&eps, &phi, &se, with_log_factor)
}

/// [`fit_rate`] on raw `(ε, φ, se(φ))` triples.
pub fn fit_rate_points(eps: &[f64], phi: &[f64], se: &[f64], with_log_factor: bool) -> Result<RateFit> {
    if eps.len() < 4 {
        return Err(Error::TooFewPoints { usable: eps.len(), needed: 4 });
    }
    let x: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    if with_log_factor && x.iter().any(|v| *v < 1.0) {
        return invalid("eps", "log factor needs log(1/eps) >= 1 on every fitted point");
    }
    let y: Vec<f64> = phi.iter().map(|p| p.ln()).collect();
    let w: Vec<f64> = phi.iter().zip(se).map(|(p, s)| (p / s) * (p / s)).collect();
    if with_log_factor {
        let z: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        fit_log_law(&x, Some(&z), &y, &w)
    } else {
        fit_log_law(&x, None, &y, &w)
    }
}
