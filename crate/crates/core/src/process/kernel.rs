use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use super::grid::{Grid, PathSample};
use crate::error::{invalid, Result};
use crate::stable::{sample_sas, StableIndex};

/// Nonnegative weight function `ρ` on `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Constant(f64),
    /// `ρ(t) = t^exponent`.
    Power { exponent: f64 },
    /// Values at the grid points.
    Values(Vec<f64>),
}

impl Weight {
    pub fn at_grid(&self, points: usize) -> Result<Vec<f64>> {
        let v: Vec<f64> = match self {
            Weight::Constant(c) => alloc::vec![*c; points],
            Weight::Power { exponent } => (1..=points).map(|i| (i as f64 / points as f64).powf(*exponent)).collect(),
            Weight::Values(v) => {
                if v.len() != points {
                    return invalid("weight", alloc::format!("{} values for {points} grid points", v.len()));
                }
                v.clone()
            }
        };
        if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return invalid("weight", "must be finite and nonnegative");
        }
        Ok(v)
    }

    /// `(∫₀¹ ρ^r)^{1/r}` by the rectangle rule on `points` cells (`r > 0`).
    pub fn norm(&self, r: f64, points: usize) -> Result<f64> {
        let v = self.at_grid(points)?;
        Ok((v.iter().map(|x| x.powf(r)).sum::<f64>() / points as f64).powf(1.0 / r))
    }
}

/// Kernel `K(t, s)` of a stable integral `X(t) = ∫ K(t,s) dM(s)` with a
/// probability control measure on `[0,1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `K(t,s) = (t-s)^{H-1/α} 1_{s<t}`.
    RiemannLiouville { hurst: f64 },
    /// `K(t,s) = 1_{s≤t}`.
    LevyMotion,
    /// `ρ(t) 1_{s≤t}`.
    WeightedLevy { weight: Weight },
    /// `Π_i 1_{s_i≤t_i}` on `[0,1]^dim`.
    Sheet { dim: usize },
}

impl KernelSpec {
    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::Sheet { dim } => *dim,
            _ => 1,
        }
    }

    pub fn validate(&self, alpha: StableIndex) -> Result<()> {
        match self {
            KernelSpec::RiemannLiouville { hurst } => {
                let h = *hurst;
                let a = alpha.value();
                if !(h > 0.0 && h.is_finite()) {
                    return invalid("hurst", "must be positive");
                }
                if h <= 1.0 / a - 1.0 {
                    return invalid("hurst", alloc::format!("kernel not integrable: need H > 1/alpha - 1 = {}", 1.0 / a - 1.0));
                }
            }
            KernelSpec::Sheet { dim } => {
                if *dim == 0 {
                    return invalid("dim", "sheet dimension must be >= 1");
                }
            }
            KernelSpec::WeightedLevy { weight } => {
                if let Weight::Constant(c) = weight {
                    if !(c.is_finite() && *c >= 0.0) {
                        return invalid("weight", "must be finite and nonnegative");
                    }
                }
            }
            KernelSpec::LevyMotion => {}
        }
        Ok(())
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<(usize, usize)> {
        grid.validate()?;
        match *grid {
            Grid::Lattice { points, dim } if dim == self.dim() => Ok((points, dim)),
            _ => invalid("grid", alloc::format!("kernel needs a {}-dimensional lattice", self.dim())),
        }
    }

    /// `‖K(t,·)‖_α^α` at `t = (t_0, …)`.
    pub fn alpha_norm_pow(&self, t: &[f64], alpha: StableIndex) -> f64 {
        let a = alpha.value();
        match self {
            KernelSpec::RiemannLiouville { hurst } => t[0].powf(a * hurst) / (a * hurst),
            KernelSpec::LevyMotion => t[0],
            KernelSpec::WeightedLevy { weight } => {
                let rho = match weight {
                    Weight::Constant(c) => *c,
                    Weight::Power { exponent } => t[0].powf(*exponent),
                    Weight::Values(_) => f64::NAN,
                };
                rho.powf(a) * t[0]
            }
            KernelSpec::Sheet { .. } => t.iter().product(),
        }
    }
}

/// Linear map from cell noise to grid values, built from cell weights
/// `(∫_cell |K(t_i,s)|^p ds)^{1/p}`.
#[derive(Debug, Clone)]
pub(crate) enum CellOperator {
    /// Cumulative sums along every axis of `cell · noise`, then times `rho`.
    Cumulative { points: usize, dim: usize, cell: f64, rho: Option<Vec<f64>> },
    /// `x_i = Σ_{k≤i} taps[i-k] noise_k`; `rev` holds the taps reversed.
    Toeplitz { rev: Vec<f64> },
}

impl CellOperator {
    pub(crate) fn new(kernel: &KernelSpec, alpha: StableIndex, grid: &Grid, p: f64) -> Result<Self> {
        let (points, dim) = kernel.check_grid(grid)?;
        let h = 1.0 / points as f64;
        match kernel {
            KernelSpec::LevyMotion | KernelSpec::Sheet { .. } => {
                Ok(CellOperator::Cumulative { points, dim, cell: h.powf(dim as f64 / p), rho: None })
            }
            KernelSpec::WeightedLevy { weight } => Ok(CellOperator::Cumulative {
                points,
                dim: 1,
                cell: h.powf(1.0 / p),
                rho: Some(weight.at_grid(points)?),
            }),
            KernelSpec::RiemannLiouville { hurst } => {
                let e1 = p * (hurst - 1.0 / alpha.value()) + 1.0;
                if e1 <= 0.0 {
                    return invalid("hurst", alloc::format!("kernel is not in L{p}"));
                }
                let scale = h.powf(e1) / e1;
                let mut rev: Vec<f64> = (0..points)
                    .map(|m| {
                        let m = m as f64;
                        (scale * ((m + 1.0).powf(e1) - m.powf(e1))).powf(1.0 / p)
                    })
                    .collect();
                rev.reverse();
                Ok(CellOperator::Toeplitz { rev })
            }
        }
    }

    pub(crate) fn apply(&self, noise: &[f64], out: &mut [f64]) {
        match self {
            CellOperator::Cumulative { points, dim, cell, rho } => {
                for (o, z) in out.iter_mut().zip(noise) {
                    *o = cell * z;
                }
                cumulate(out, *points, *dim);
                if let Some(r) = rho {
                    for (o, w) in out.iter_mut().zip(r) {
                        *o *= w;
                    }
                }
            }
            CellOperator::Toeplitz { rev } => {
                let g = rev.len();
                for i in 0..g {
                    let taps = &rev[g - 1 - i..];
                    out[i] = dot(&noise[..=i], taps);
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        s += x * y;
    }
    s
}

/// In-place prefix sums along each axis of a row-major `points^dim` array.
pub(crate) fn cumulate(x: &mut [f64], points: usize, dim: usize) {
    if dim == 1 {
        let mut acc = 0.0;
        for v in x.iter_mut() {
            acc += *v;
            *v = acc;
        }
        return;
    }
    let mut stride = 1;
    for _ in 0..dim {
        let block = stride * points;
        for chunk in x.chunks_mut(block) {
            for i in 1..points {
                let (done, rest) = chunk.split_at_mut(i * stride);
                let prev = &done[(i - 1) * stride..];
                for (c, p) in rest[..stride].iter_mut().zip(prev) {
                    *c += p;
                }
            }
        }
        stride = block;
    }
}

/// Grid sampler `X(t_i) = Σ_k w_{ik} ξ_k`, `w_{ik} = (∫_{cell k} |K(t_i,s)|^α ds)^{1/α}`,
/// with one standard SαS variate per cell. Each `X(t_i)` has exactly the
/// target marginal law; for indicator kernels the joint law on the grid is exact.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    alpha: StableIndex,
    grid: Grid,
    op: CellOperator,
}

impl IncrementSampler {
    pub fn new(kernel: &KernelSpec, alpha: StableIndex, grid: Grid) -> Result<Self> {
        kernel.validate(alpha)?;
        let op = CellOperator::new(kernel, alpha, &grid, alpha.value())?;
        Ok(Self { alpha, grid, op })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Fills `out` with one path, using `noise` as scratch.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, noise: &mut Vec<f64>, out: &mut Vec<f64>) {
        let n = self.grid.len();
        noise.clear();
        noise.extend((0..n).map(|_| sample_sas(self.alpha, rng)));
        out.resize(n, 0.0);
        self.op.apply(noise, out);
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PathSample {
        let mut noise = Vec::new();
        let mut out = Vec::new();
        self.sample_into(rng, &mut noise, &mut out);
        PathSample { grid: self.grid, values: out }
    }
}

pub fn sample_path_increments<R: Rng + ?Sized>(
    kernel: &KernelSpec,
    alpha: StableIndex,
    grid: Grid,
    rng: &mut R,
) -> Result<PathSample> {
    Ok(IncrementSampler::new(kernel, alpha, grid)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulate_two_axes() {
        let mut x = alloc::vec![1.0; 9];
        cumulate(&mut x, 3, 2);
        assert_eq!(x, alloc::vec![1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 3.0, 6.0, 9.0]);
    }

    #[test]
    fn rl_taps_integrate_kernel() {
        // sum of taps^alpha = ∫₀¹ (1-s)^{αH-1} ds = 1/(αH)
        let a = StableIndex::new(1.2).unwrap();
        let op = CellOperator::new(&KernelSpec::RiemannLiouville { hurst: 0.6 }, a, &Grid::uniform(256), 1.2).unwrap();
        let CellOperator::Toeplitz { rev } = op else { panic!() };
        let s: f64 = rev.iter().map(|w| w.powf(1.2)).sum();
        assert!((s - 1.0 / 0.72).abs() < 1e-12);
    }

    #[test]
    fn rl_integrability_rule() {
        let a = StableIndex::new(0.5).unwrap();
        assert!(KernelSpec::RiemannLiouville { hurst: 1.0 }.validate(a).is_err());
        assert!(KernelSpec::RiemannLiouville { hurst: 1.2 }.validate(a).is_ok());
        assert!(KernelSpec::RiemannLiouville { hurst: 0.0 }.validate(StableIndex::new(1.5).unwrap()).is_err());
    }

    #[test]
    fn zero_weight_gives_zero_path() {
        let a = StableIndex::new(1.3).unwrap();
        let k = KernelSpec::WeightedLevy { weight: Weight::Constant(0.0) };
        let p = sample_path_increments(&k, a, Grid::uniform(32), &mut crate::RngSpec::new(1, 1).rng()).unwrap();
        assert!(p.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn sheet_one_equals_levy() {
        let a = StableIndex::new(1.7).unwrap();
        let s = crate::RngSpec::new(9, 4);
        let x = sample_path_increments(&KernelSpec::LevyMotion, a, Grid::uniform(128), &mut s.rng()).unwrap();
        let y = sample_path_increments(&KernelSpec::Sheet { dim: 1 }, a, Grid::uniform(128), &mut s.rng()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn grid_dimension_mismatch() {
        let a = StableIndex::new(1.0).unwrap();
        assert!(IncrementSampler::new(&KernelSpec::Sheet { dim: 2 }, a, Grid::uniform(8)).is_err());
        assert!(IncrementSampler::new(&KernelSpec::LevyMotion, a, Grid::Sequence { len: 8 }).is_err());
    }
}
