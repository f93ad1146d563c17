//! Weighted least squares for power/log-power rate laws.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::t_quantile_975;

/// Fitted `log y = intercept + tau x + theta z`.
///
/// For small-deviation curves `x = log(1/ε)`, `z = log log(1/ε)`; for
/// rearrangements `x = log k`, `z = log log(k+2)`, so `tau` is the
/// (negative) slope there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub tau: f64,
    /// Zero when the log factor was not fitted.
    pub theta: f64,
    pub intercept: f64,
    /// Root mean square residual of the fitted logs.
    pub residual_rms: f64,
    /// 95% interval for `tau`.
    pub tau_ci: (f64, f64),
    pub theta_ci: Option<(f64, f64)>,
    pub n_points: usize,
}

impl RateFit {
    /// `exp(intercept)`, the fitted constant in front of the rate.
    pub fn constant(&self) -> f64 {
        self.intercept.exp()
    }
}

fn t975(df: usize) -> f64 {
    match df {
        0 => f64::INFINITY,
        1 => 12.706_204_736,
        2 => 4.302_652_73,
        3 => 3.182_446_305,
        d => t_quantile_975(d as f64),
    }
}

/// Least squares of `y` on `[1, x, z?]` with weights `w` (all positive).
pub fn fit_log_law(x: &[f64], z: Option<&[f64]>, y: &[f64], w: &[f64]) -> Result<RateFit> {
    let n = y.len();
    let p = if z.is_some() { 3 } else { 2 };
    if n < 4 || n <= p {
        return Err(Error::TooFewPoints { usable: n, needed: 4.max(p + 1) });
    }
    if x.len() != n || w.len() != n || z.is_some_and(|z| z.len() != n) {
        return Err(Error::Invalid { field: "points", reason: "column lengths differ".into() });
    }
    if x.iter().chain(y).chain(w).chain(z.unwrap_or(&[])).any(|v| !v.is_finite()) || w.iter().any(|v| *v <= 0.0) {
        return Err(Error::Invalid { field: "points", reason: "non-finite value or nonpositive weight".into() });
    }
    // columns scaled by sqrt(w), column-major
    let mut a: Vec<f64> = Vec::with_capacity(n * p);
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    a.extend(sw.iter().copied());
    a.extend(x.iter().zip(&sw).map(|(v, s)| v * s));
    if let Some(z) = z {
        a.extend(z.iter().zip(&sw).map(|(v, s)| v * s));
    }
    let mut b: Vec<f64> = y.iter().zip(&sw).map(|(v, s)| v * s).collect();
    let r = householder(&mut a, &mut b, n, p)?;
    let beta = back_substitute(&r, &b[..p], p);
    let mut wss = 0.0;
    let mut ss = 0.0;
    for i in 0..n {
        let mut fit = beta[0] + beta[1] * x[i];
        if let Some(z) = z {
            fit += beta[2] * z[i];
        }
        let res = y[i] - fit;
        ss += res * res;
        wss += w[i] * res * res;
    }
    let df = n - p;
    let s2 = wss / df as f64;
    let rinv = invert_upper(&r, p);
    let var = |j: usize| s2 * (j..p).map(|k| rinv[j * p + k] * rinv[j * p + k]).sum::<f64>();
    let q = t975(df);
    let half_tau = q * var(1).sqrt();
    let theta_ci = (p == 3).then(|| {
        let h = q * var(2).sqrt();
        (beta[2] - h, beta[2] + h)
    });
    Ok(RateFit {
        tau: beta[1],
        theta: if p == 3 { beta[2] } else { 0.0 },
        intercept: beta[0],
        residual_rms: (ss / n as f64).sqrt(),
        tau_ci: (beta[1] - half_tau, beta[1] + half_tau),
        theta_ci,
        n_points: n,
    })
}

/// In-place Householder QR of the column-major `n × p` matrix `a`, applying
/// the reflections to `b`. Returns `R` row-major `p × p`.
fn householder(a: &mut [f64], b: &mut [f64], n: usize, p: usize) -> Result<Vec<f64>> {
    let mut r = alloc::vec![0.0; p * p];
    for j in 0..p {
        let col = j * n;
        let norm = a[col + j..col + n].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Invalid { field: "points", reason: "design matrix is rank deficient".into() });
        }
        let alpha = if a[col + j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[col + j..col + n].to_vec();
        v[0] -= alpha;
        let vn = v.iter().map(|x| x * x).sum::<f64>();
        if vn > 0.0 {
            for k in j..p {
                let ck = k * n;
                let d: f64 = v.iter().zip(&a[ck + j..ck + n]).map(|(x, y)| x * y).sum::<f64>() * 2.0 / vn;
                for (i, vi) in v.iter().enumerate() {
                    a[ck + j + i] -= d * vi;
                }
            }
            let d: f64 = v.iter().zip(&b[j..n]).map(|(x, y)| x * y).sum::<f64>() * 2.0 / vn;
            for (i, vi) in v.iter().enumerate() {
                b[j + i] -= d * vi;
            }
        }
        for k in j..p {
            r[j * p + k] = a[k * n + j];
        }
        if r[j * p + j].abs() <= 1e-13 * norm.max(1.0) {
            return Err(Error::Invalid { field: "points", reason: "design matrix is rank deficient".into() });
        }
    }
    Ok(r)
}

fn back_substitute(r: &[f64], b: &[f64], p: usize) -> Vec<f64> {
    let mut x = alloc::vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|k| r[i * p + k] * x[k]).sum();
        x[i] = (b[i] - s) / r[i * p + i];
    }
    x
}

fn invert_upper(r: &[f64], p: usize) -> Vec<f64> {
    let mut inv = alloc::vec![0.0; p * p];
    for c in 0..p {
        let mut e = alloc::vec![0.0; p];
        e[c] = 1.0;
        let col = back_substitute(r, &e, p);
        for i in 0..p {
            inv[i * p + c] = col[i];
        }
    }
    inv
}
