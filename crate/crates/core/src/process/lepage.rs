use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::grid::{Grid, PathSample};
use super::kernel::{cumulate, CellOperator, KernelSpec};
use crate::error::{invalid, Result};
use crate::stable::{lepage_min_terms, lepage_remainder_mean, lepage_scale, LePageStream, SiteLaw, Sites, StableIndex};

/// A LePage path together with its truncation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LePagePath {
    pub path: PathSample,
    /// Set when the stream is shorter than the `1e-4` relative tail rule asks for.
    pub truncation_warning: bool,
    /// Whether the neglected tail was replaced by its Gaussian approximation.
    pub compensated: bool,
}

/// Conditionally Gaussian series sampler
/// `Y(t_i) = s_α Σ_{j≤J} Γ_j^{-1/α} ξ_j K(t_i, V_j)`, ξ standard normal,
/// `s_α = c_α/√2`, sites uniform on the unit cube.
///
/// Given the arrivals, the terms beyond `J` form a centred Gaussian field with
/// covariance `s_α² E[Σ_{j>J} Γ_j^{-2/α} | Γ_J] ∫ K(t,s) K(t',s) ds`. When the
/// kernel is square integrable the sampler adds that field (built from cell
/// `L2` weights) instead of dropping it.
#[derive(Debug, Clone)]
pub struct LePageSampler {
    kernel: KernelSpec,
    alpha: StableIndex,
    grid: Grid,
    points: usize,
    scale: f64,
    rho: Option<Vec<f64>>,
    remainder: Option<CellOperator>,
    min_terms: Option<u64>,
}

impl LePageSampler {
    pub fn new(kernel: &KernelSpec, alpha: StableIndex, grid: Grid, compensate: bool) -> Result<Self> {
        let alpha = alpha.require_stable()?;
        kernel.validate(alpha)?;
        let (points, _) = kernel.check_grid(&grid)?;
        let rho = match kernel {
            KernelSpec::WeightedLevy { weight } => Some(weight.at_grid(points)?),
            _ => None,
        };
        let remainder = if compensate { CellOperator::new(kernel, alpha, &grid, 2.0).ok() } else { None };
        Ok(Self {
            kernel: kernel.clone(),
            alpha,
            grid,
            points,
            scale: lepage_scale(alpha)?,
            rho,
            remainder,
            min_terms: lepage_min_terms(alpha),
        })
    }

    pub fn site_law(&self) -> SiteLaw<'static> {
        SiteLaw::UnitCube { dim: self.kernel.dim() }
    }

    /// Whether the neglected tail is compensated for this kernel.
    pub fn compensates(&self) -> bool {
        self.remainder.is_some()
    }

    pub fn sample<R: Rng + ?Sized>(&self, stream: &LePageStream, rng: &mut R) -> Result<LePagePath> {
        let Sites::Points { dim, coords } = &stream.sites else {
            return invalid("stream", "sites must be points of the unit cube");
        };
        if *dim != self.kernel.dim() || stream.sites.len() != stream.gammas.len() {
            return invalid("stream", "site dimension or count does not match the kernel");
        }
        let a = self.alpha.value();
        let g = self.points;
        let n = self.grid.len();
        let mut values = alloc::vec![0.0; n];
        match &self.kernel {
            KernelSpec::RiemannLiouville { hurst } => {
                let e = hurst - 1.0 / a;
                for (gamma, v) in stream.gammas.iter().zip(coords) {
                    let xi: f64 = StandardNormal.sample(rng);
                    let b = self.scale * gamma.powf(-1.0 / a) * xi;
                    let first = ((v * g as f64).floor() as usize).min(g);
                    for (i, y) in values.iter_mut().enumerate().skip(first) {
                        let t = (i + 1) as f64 / g as f64;
                        if t > *v {
                            *y += b * (t - v).powf(e);
                        }
                    }
                }
            }
            _ => {
                for (j, gamma) in stream.gammas.iter().enumerate() {
                    let xi: f64 = StandardNormal.sample(rng);
                    let b = self.scale * gamma.powf(-1.0 / a) * xi;
                    let mut idx = 0;
                    for c in &coords[j * dim..(j + 1) * dim] {
                        let cell = ((c * g as f64).ceil() as usize).clamp(1, g) - 1;
                        idx = idx * g + cell;
                    }
                    values[idx] += b;
                }
                cumulate(&mut values, g, *dim);
                if let Some(r) = &self.rho {
                    for (y, w) in values.iter_mut().zip(r) {
                        *y *= w;
                    }
                }
            }
        }
        let compensated = match (&self.remainder, stream.gammas.last()) {
            (Some(op), Some(&last)) => {
                let sd = self.scale * lepage_remainder_mean(self.alpha, last).sqrt();
                let noise: Vec<f64> = (0..n).map(|_| { let z: f64 = StandardNormal.sample(rng); sd * z }).collect();
                let mut field = alloc::vec![0.0; n];
                op.apply(&noise, &mut field);
                for (y, f) in values.iter_mut().zip(&field) {
                    *y += f;
                }
                true
            }
            _ => false,
        };
        let truncation_warning = self.min_terms.is_none_or(|m| (stream.terms() as u64) < m);
        Ok(LePagePath { path: PathSample { grid: self.grid, values }, truncation_warning, compensated })
    }
}

/// One LePage path with tail compensation where the kernel allows it.
pub fn sample_path_lepage<R: Rng + ?Sized>(
    kernel: &KernelSpec,
    alpha: StableIndex,
    stream: &LePageStream,
    grid: Grid,
    rng: &mut R,
) -> Result<LePagePath> {
    LePageSampler::new(kernel, alpha, grid, true)?.sample(stream, rng)
}
