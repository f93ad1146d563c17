use crate::error::{invalid, Result};

/// Examples with known small-deviation exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExampleId {
    /// Riemann–Liouville process in `L_q`, `q` may be infinite for sup norm.
    RiemannLiouville { hurst: f64, alpha: f64, q: f64 },
    /// Weighted Lévy motion in `L_q`, `1 ≤ q < ∞`.
    WeightedLevy { alpha: f64, q: f64 },
    /// α-stable sheet on `[0,1]^dim` in `L_q`, `q < ∞`.
    Sheet { alpha: f64, dim: usize, q: f64 },
    /// Sum of maxima with `ϑ_n = 2^{-n/γ} n^{-β/γ}`, `γ ≤ α`.
    SumOfMaxima { alpha: f64, gamma: f64, beta: f64 },
    /// Hölder operator with exponent `beta` on a set of covering exponent `gamma`.
    Holder { beta: f64, gamma: f64, alpha: f64 },
    /// Any SαS vector with `α < 1`.
    Ryznar { alpha: f64 },
    /// Standard Brownian motion, sup norm.
    BrownianSup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    TwoSided,
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaPrediction {
    Exact(f64),
    Interval { lower: f64, upper: f64 },
}

/// Predicted `φ(ε) ≈ C ε^{-tau} log(1/ε)^{theta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePrediction {
    pub example: ExampleId,
    /// `f64::INFINITY` when `φ ≡ ∞`.
    pub tau: f64,
    pub theta: ThetaPrediction,
    pub kind: Bound,
    /// Known sharp constant `C`, if any.
    pub constant: Option<f64>,
    pub citation: &'static str,
}

impl RatePrediction {
    pub fn is_infinite(&self) -> bool {
        self.tau.is_infinite()
    }
}

fn alpha_ok(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return invalid("alpha", "must lie in (0, 2]");
    }
    Ok(())
}

/// `τ = (1/α - 1/2 + γβ)^{-1}`.
pub fn holder_rate(beta: f64, gamma: f64, alpha: f64) -> Result<f64> {
    alpha_ok(alpha)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return invalid("beta", "Hölder exponent must lie in (0, 1]");
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return invalid("gamma", "covering exponent must be positive");
    }
    let d = 1.0 / alpha - 0.5 + gamma * beta;
    if d <= 0.0 {
        return invalid("beta", "1/alpha - 1/2 + gamma*beta must be positive");
    }
    Ok(1.0 / d)
}

pub fn predicted_rate(id: ExampleId) -> Result<RatePrediction> {
    let two = |tau: f64, theta: f64, citation| RatePrediction {
        example: id,
        tau,
        theta: ThetaPrediction::Exact(theta),
        kind: Bound::TwoSided,
        constant: None,
        citation,
    };
    match id {
        ExampleId::RiemannLiouville { hurst, alpha, q } => {
            alpha_ok(alpha)?;
            if !(q >= 1.0) {
                return invalid("q", "must be >= 1");
            }
            let floor = (1.0 / alpha - 1.0 / q).max(0.0);
            if !(hurst > floor) {
                return invalid("hurst", "rate known for H > [1/alpha - 1/q]_+");
            }
            Ok(two(1.0 / hurst, 0.0, "Riemann-Liouville process in L_q: -log P ~ c eps^(-1/H)"))
        }
        ExampleId::WeightedLevy { alpha, q } => {
            alpha_ok(alpha)?;
            if !(q >= 1.0 && q.is_finite()) {
                return invalid("q", "must satisfy 1 <= q < inf");
            }
            Ok(two(alpha, 0.0, "weighted Levy motion in L_q: eps^(-alpha) with constants between ||rho||_r and ||rho||_q"))
        }
        ExampleId::Sheet { alpha, dim, q } => {
            alpha_ok(alpha)?;
            if dim == 0 {
                return invalid("dim", "must be >= 1");
            }
            if !(q >= 1.0 && q.is_finite()) {
                return invalid("q", "must satisfy 1 <= q < inf");
            }
            let d = dim as f64;
            Ok(RatePrediction {
                example: id,
                tau: alpha,
                theta: ThetaPrediction::Interval { lower: alpha * (d - 1.0), upper: alpha * (d - 0.5) },
                kind: Bound::TwoSided,
                constant: None,
                citation: "alpha-stable sheet in L_q: eps^(-alpha) log(1/eps)^theta, alpha(d-1) <= theta <= alpha(d-1/2)",
            })
        }
        ExampleId::SumOfMaxima { alpha, gamma, beta } => {
            alpha_ok(alpha)?;
            if !(gamma > 0.0) {
                return invalid("gamma", "must be positive");
            }
            if gamma < alpha {
                return Ok(two(gamma, -beta, "sum of maxima, gamma < alpha: eps^(-gamma) log(1/eps)^(-beta)"));
            }
            if gamma > alpha {
                return invalid("gamma", "no rate known for gamma > alpha");
            }
            let c = "sum of maxima, critical gamma = alpha: four-branch rate in beta";
            let m = alpha.max(1.0);
            Ok(if beta <= m {
                two(f64::INFINITY, 0.0, c)
            } else if beta < 1.0 + alpha {
                two(1.0 / (beta / alpha - 1.0), 0.0, c)
            } else if beta == 1.0 + alpha {
                two(alpha, 1.0 + alpha, c)
            } else {
                two(alpha, -beta + 1.0 + alpha, c)
            })
        }
        ExampleId::Holder { beta, gamma, alpha } => Ok(RatePrediction {
            kind: Bound::Upper,
            ..two(holder_rate(beta, gamma, alpha)?, 0.0, "Hölder operators: 1/tau = 1/alpha - 1/2 + gamma*beta")
        }),
        ExampleId::Ryznar { alpha } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return invalid("alpha", "bound holds for alpha < 1");
            }
            Ok(RatePrediction {
                kind: Bound::Upper,
                ..two(alpha / (1.0 - alpha), 0.0, "universal bound for SaS vectors with alpha < 1 (Ryznar)")
            })
        }
        ExampleId::BrownianSup => Ok(RatePrediction {
            constant: Some(core::f64::consts::PI * core::f64::consts::PI / 8.0),
            ..two(2.0, 0.0, "Brownian motion, sup norm: -log P ~ (pi^2/8) eps^(-2)")
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_entries() {
        let rl = predicted_rate(ExampleId::RiemannLiouville { hurst: 0.6, alpha: 1.2, q: 2.0 }).unwrap();
        assert!((rl.tau - 1.0 / 0.6).abs() < 1e-15);
        let a = 1.5;
        let crit = predicted_rate(ExampleId::SumOfMaxima { alpha: a, gamma: a, beta: 1.0 + a }).unwrap();
        assert_eq!((crit.tau, crit.theta), (a, ThetaPrediction::Exact(1.0 + a)));
        let inf = predicted_rate(ExampleId::SumOfMaxima { alpha: a, gamma: a, beta: 1.2 }).unwrap();
        assert!(inf.is_infinite());
        let mid = predicted_rate(ExampleId::SumOfMaxima { alpha: a, gamma: a, beta: 2.0 }).unwrap();
        assert!((mid.tau - 1.0 / (2.0 / 1.5 - 1.0)).abs() < 1e-12);
        let big = predicted_rate(ExampleId::SumOfMaxima { alpha: a, gamma: a, beta: 3.0 }).unwrap();
        assert_eq!(big.theta, ThetaPrediction::Exact(-0.5));
        let sub = predicted_rate(ExampleId::SumOfMaxima { alpha: a, gamma: 1.0, beta: 0.0 }).unwrap();
        assert_eq!(sub.tau, 1.0);
        let ry = predicted_rate(ExampleId::Ryznar { alpha: 0.5 }).unwrap();
        assert_eq!((ry.tau, ry.kind), (1.0, Bound::Upper));
        assert!(predicted_rate(ExampleId::Ryznar { alpha: 1.2 }).is_err());
        let sh = predicted_rate(ExampleId::Sheet { alpha: 1.5, dim: 2, q: 2.0 }).unwrap();
        assert_eq!(sh.theta, ThetaPrediction::Interval { lower: 1.5, upper: 2.25 });
    }

    #[test]
    fn holder() {
        assert_eq!(holder_rate(1.0, 1.0, 2.0).unwrap(), 1.0);
        for (h, a) in [(0.6, 1.2), (0.9, 1.5), (0.5, 2.0)] {
            let tau = holder_rate(h - 1.0 / a + 0.5, 1.0, a).unwrap();
            assert!((tau - 1.0 / h).abs() < 1e-12);
        }
        assert!(holder_rate(1.0, 0.0, 1.0).is_err());
        assert!(holder_rate(0.1, 0.1, 2.0).unwrap() > 0.0);
        assert!(holder_rate(0.0, 1.0, 2.0).is_err());
    }
}
