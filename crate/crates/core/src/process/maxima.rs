use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use super::grid::{Grid, PathSample};
use super::theta::ThetaSeq;
use crate::error::{invalid, Error, Result};
use crate::stable::{sample_sas, tail_constant, StableIndex};

/// Default cap on sum-of-maxima levels (`2^25` variates per sample).
pub const DEFAULT_MAX_LEVELS: u32 = 24;

/// The array `(ϑ_n ξ_{n,l})`, `l ≤ 2^n`, `n ≤ levels`, with norm
/// `Σ_n ϑ_n max_l |ξ_{n,l}|`.
#[derive(Debug, Clone)]
pub struct SumOfMaxima {
    theta: Vec<f64>,
    alpha: StableIndex,
    levels: u32,
    certificate: f64,
}

impl SumOfMaxima {
    pub fn new(theta: &ThetaSeq, levels: u32, alpha: StableIndex, max_levels: u32) -> Result<Self> {
        theta.validate()?;
        if levels == 0 {
            return invalid("levels", "need at least one level");
        }
        if levels > max_levels {
            return Err(Error::Budget(format!(
                "{levels} levels need 2^{} variates per sample; the cap is {max_levels} levels",
                levels + 1
            )));
        }
        Ok(Self {
            theta: theta.values(levels as usize),
            alpha,
            levels,
            certificate: maxima_bias_certificate(theta, levels, alpha),
        })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Typical size of the dropped levels; see [`maxima_bias_certificate`].
    pub fn certificate(&self) -> f64 {
        self.certificate
    }

    pub fn sample_norm<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut total = 0.0;
        for (n, th) in self.theta.iter().enumerate() {
            let mut m: f64 = 0.0;
            for _ in 0..(1usize << (n + 1)) {
                m = m.max(sample_sas(self.alpha, rng).abs());
            }
            total += th * m;
        }
        total
    }

    pub fn sample_array<R: Rng + ?Sized>(&self, rng: &mut R) -> PathSample {
        let grid = Grid::Blocks { levels: self.levels };
        let mut values = Vec::with_capacity(grid.len());
        for (n, th) in self.theta.iter().enumerate() {
            for _ in 0..(1usize << (n + 1)) {
                values.push(th * sample_sas(self.alpha, rng));
            }
        }
        PathSample { grid, values }
    }
}

pub fn sum_of_maxima_sample<R: Rng + ?Sized>(theta: &ThetaSeq, levels: u32, alpha: StableIndex, rng: &mut R) -> Result<f64> {
    Ok(SumOfMaxima::new(theta, levels, alpha, DEFAULT_MAX_LEVELS)?.sample_norm(rng))
}

pub fn sum_of_maxima_array<R: Rng + ?Sized>(
    theta: &ThetaSeq,
    levels: u32,
    alpha: StableIndex,
    rng: &mut R,
) -> Result<PathSample> {
    Ok(SumOfMaxima::new(theta, levels, alpha, DEFAULT_MAX_LEVELS)?.sample_array(rng))
}

/// `Σ_{n>levels} ϑ_n m_n` with `m_n = (2^n C_α / ln 2)^{1/α}` the median of the
/// maximum of `2^n` standard SαS magnitudes (`C_α` the two-sided tail constant).
/// Infinite when the series does not settle within 4096 further levels or
/// `α = 2`.
pub fn maxima_bias_certificate(theta: &ThetaSeq, levels: u32, alpha: StableIndex) -> f64 {
    let a = alpha.value();
    if alpha.is_gaussian() {
        return f64::INFINITY;
    }
    let c = (2.0 * tail_constant(a) / core::f64::consts::LN_2).powf(1.0 / a);
    let mut total = 0.0;
    for n in (levels as usize + 1)..(levels as usize + 4097) {
        let term = theta.value(n) * c * ((n as f64) * core::f64::consts::LN_2 / a).exp();
        total += term;
        if term == 0.0 || term < 1e-16 * total {
            return total;
        }
    }
    f64::INFINITY
}

/// Finite diagonal vector `(ϑ_n ξ_n)_{n ≤ len}` on a sequence grid.
#[derive(Debug, Clone)]
pub struct DiagonalVector {
    theta: Vec<f64>,
    alpha: StableIndex,
}

impl DiagonalVector {
    pub fn new(theta: &ThetaSeq, len: usize, alpha: StableIndex) -> Result<Self> {
        theta.validate()?;
        if len == 0 {
            return invalid("len", "need at least one coordinate");
        }
        Ok(Self { theta: theta.values(len), alpha })
    }

    pub fn grid(&self) -> Grid {
        Grid::Sequence { len: self.theta.len() }
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.theta.iter().map(|t| t * sample_sas(self.alpha, rng)));
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PathSample {
        let mut v = Vec::new();
        self.sample_into(rng, &mut v);
        PathSample { grid: self.grid(), values: v }
    }
}

/// Coefficient `κ` with `φ_full(ε) - φ_truncated(ε) ≲ κ ε^{-α}` for the sup
/// norm: `κ = C_α Σ_{n>len} ϑ_n^α`, using `-log(1-x) ≈ x` for the dropped
/// coordinates. Summed over 10^6 further terms plus an integral tail for
/// polynomial sequences.
pub fn diagonal_tail_certificate(theta: &ThetaSeq, len: usize, alpha: StableIndex) -> f64 {
    let a = alpha.value();
    if alpha.is_gaussian() {
        return f64::INFINITY;
    }
    let c = 2.0 * tail_constant(a);
    let end = len + 1_000_000;
    let head: f64 = (len + 1..=end).map(|n| theta.value(n).powf(a)).sum();
    let tail = match theta {
        ThetaSeq::Polynomial { exponent } => {
            let s = exponent * a;
            if s <= 1.0 {
                return f64::INFINITY;
            }
            (end as f64 + 0.5).powf(1.0 - s) / (s - 1.0)
        }
        _ => 0.0,
    };
    c * (head + tail)
}
