use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};

/// Decreasing coefficient sequence `ϑ_1 ≥ ϑ_2 ≥ … ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaSeq {
    /// `ϑ_n = 2^{-n/γ} n^{-β/γ}`.
    PowerLog { gamma: f64, beta: f64 },
    /// `ϑ_n = n^{-exponent}`.
    Polynomial { exponent: f64 },
    /// Listed values; zero beyond the list.
    Explicit(Vec<f64>),
}

impl ThetaSeq {
    pub fn validate(&self) -> Result<()> {
        match self {
            ThetaSeq::PowerLog { gamma, beta } => {
                if !(*gamma > 0.0 && gamma.is_finite()) {
                    return invalid("gamma", "must be positive");
                }
                // log ϑ_n has derivative -(ln 2 + β/n)/γ, negative for n ≥ 1
                if !(*beta > -core::f64::consts::LN_2 && beta.is_finite()) {
                    return invalid("beta", "must exceed -ln 2 for a decreasing sequence");
                }
            }
            ThetaSeq::Polynomial { exponent } => {
                if !(*exponent > 0.0 && exponent.is_finite()) {
                    return invalid("exponent", "must be positive for a null sequence");
                }
            }
            ThetaSeq::Explicit(v) => {
                if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return invalid("theta", "values must be finite and nonnegative");
                }
                if v.windows(2).any(|w| w[1] > w[0]) {
                    return invalid("theta", "values must be nonincreasing");
                }
            }
        }
        Ok(())
    }

    /// `ϑ_n`, 1-based.
    pub fn value(&self, n: usize) -> f64 {
        let x = n as f64;
        match self {
            ThetaSeq::PowerLog { gamma, beta } => (-(x * core::f64::consts::LN_2 + beta * x.ln()) / gamma).exp(),
            ThetaSeq::Polynomial { exponent } => x.powf(-exponent),
            ThetaSeq::Explicit(v) => v.get(n.wrapping_sub(1)).copied().unwrap_or(0.0),
        }
    }

    /// `ϑ_1..=ϑ_n`.
    pub fn values(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.value(k)).collect()
    }

    /// Length of an explicit list, `None` for generated families.
    pub fn explicit_len(&self) -> Option<usize> {
        match self {
            ThetaSeq::Explicit(v) => Some(v.len()),
            _ => None,
        }
    }
}
