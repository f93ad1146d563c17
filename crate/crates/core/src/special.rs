//! Small numerical helpers.

#[allow(unused_imports)]
use num_traits::Float;

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn sum_compensated<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = NeumaierSum::new();
    for x in xs {
        s.add(x);
    }
    s.value()
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `log(k + 2)`, the guarded logarithm used for every index-valued log.
pub fn log_guard(k: f64) -> f64 {
    (k + 2.0).ln()
}

/// `E|ξ|^p` for a standard normal ξ.
pub fn gaussian_abs_moment(p: f64) -> f64 {
    2f64.powf(p / 2.0) * gamma((p + 1.0) / 2.0) / core::f64::consts::PI.sqrt()
}

/// Two-sided 95% Student-t quantile, Cornish–Fisher expansion about the
/// normal quantile. Accurate to about 1e-3 for `df >= 3`.
pub fn t_quantile_975(df: f64) -> f64 {
    let z = 1.959_963_984_540_054_f64;
    if !df.is_finite() {
        return z;
    }
    let z3 = z * z * z;
    let z5 = z3 * z * z;
    let z7 = z5 * z * z;
    z + (z3 + z) / (4.0 * df)
        + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * df * df)
        + (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / (384.0 * df * df * df)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        let mut xs = alloc::vec![1.0];
        xs.extend(core::iter::repeat_n(1e-16, 10_000));
        let s = sum_compensated(xs.iter().copied());
        assert!((s - (1.0 + 1e-12)).abs() < 1e-16);
    }

    #[test]
    fn abs_moment_known_values() {
        assert!((gaussian_abs_moment(2.0) - 1.0).abs() < 1e-14);
        assert!((gaussian_abs_moment(1.0) - (2.0 / core::f64::consts::PI).sqrt()).abs() < 1e-14);
        assert!((gaussian_abs_moment(4.0) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn t_quantiles_match_tables() {
        // df: 5 -> 2.5706, 10 -> 2.2281, 30 -> 2.0423
        for (df, q) in [(5.0, 2.570_58), (10.0, 2.228_14), (30.0, 2.042_27)] {
            assert!((t_quantile_975(df) - q).abs() < 5e-3, "{df}: {}", t_quantile_975(df));
        }
    }
}
