//! Stable variates, Poisson arrival times, sample sites and the constant c_α.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01};

use crate::error::{invalid, Result};
use crate::measure::MeasureOnN;
use crate::special::{gamma, gaussian_abs_moment};

/// Stability index `0 < α ≤ 2`; `α = 2` is the Gaussian case.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct StableIndex(f64);

impl StableIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return invalid("alpha", alloc::format!("must lie in (0, 2], got {alpha}"));
        }
        Ok(Self(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_gaussian(self) -> bool {
        self.0 == 2.0
    }

    /// Rejects the Gaussian case, where series representations do not apply.
    pub fn require_stable(self) -> Result<Self> {
        if self.is_gaussian() {
            return invalid("alpha", "alpha = 2 is Gaussian; use the increment sampler");
        }
        Ok(self)
    }
}

/// One standard symmetric α-stable variate, `E exp(iλX) = exp(-|λ|^α)`.
///
/// Chambers–Mallows–Stuck transform of a uniform angle and a unit exponential.
pub fn sample_sas<R: Rng + ?Sized>(alpha: StableIndex, rng: &mut R) -> f64 {
    let a = alpha.0;
    let u: f64 = Open01.sample(rng);
    let v = PI * (u - 0.5);
    if a == 1.0 {
        return v.tan();
    }
    let w = positive_exp(rng);
    if a == 2.0 {
        return 2.0 * w.sqrt() * v.sin();
    }
    let c = v.cos();
    (a * v).sin() / c.powf(1.0 / a) * (((1.0 - a) * v).cos() / w).powf((1.0 - a) / a)
}

fn positive_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let e: f64 = Exp1.sample(rng);
        if e > 0.0 {
            return e;
        }
    }
}

/// `∫₀^∞ x^{-α} sin x dx = π / (2 Γ(α) sin(πα/2))` for `0 < α < 2`.
pub fn sine_integral(alpha: f64) -> f64 {
    PI / (2.0 * gamma(alpha) * (FRAC_PI_2 * alpha).sin())
}

/// The LePage normalising constant
/// `c_α = √2 (∫₀^∞ x^{-α} sin x dx)^{-1/α} (E|ξ|^α)^{-1/α}`, ξ standard normal.
pub fn c_alpha(alpha: StableIndex) -> Result<f64> {
    let a = alpha.require_stable()?.0;
    Ok(2f64.sqrt() * (sine_integral(a) * gaussian_abs_moment(a)).powf(-1.0 / a))
}

/// Scale multiplying `Σ Γ_j^{-1/α} ξ_j K(t, V_j)` (ξ standard normal) so the
/// sum has characteristic function `exp(-|λ|^α ‖K(t,·)‖_α^α)` for a
/// probability control measure. Equals `c_α / √2`.
pub fn lepage_scale(alpha: StableIndex) -> Result<f64> {
    Ok(c_alpha(alpha)? / 2f64.sqrt())
}

/// One-sided tail constant: `P(X > t) t^α → Γ(α) sin(πα/2) / π` for `α < 2`.
pub fn tail_constant(alpha: f64) -> f64 {
    gamma(alpha) * (FRAC_PI_2 * alpha).sin() / PI
}

/// Arrival times `Γ_1 < … < Γ_J` of a unit-rate Poisson process.
pub fn gamma_arrivals<R: Rng + ?Sized>(j: usize, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(j);
    let mut g = 0.0;
    for _ in 0..j {
        loop {
            let next = g + positive_exp(rng);
            if next > g {
                g = next;
                break;
            }
        }
        out.push(g);
    }
    out
}

/// Law of the LePage sample sites.
#[derive(Debug, Clone, Copy)]
pub enum SiteLaw<'a> {
    /// A probability measure on ℕ.
    Discrete(&'a MeasureOnN),
    /// Lebesgue measure on `[0,1]^dim`.
    UnitCube { dim: usize },
}

/// Drawn sample sites.
#[derive(Debug, Clone, PartialEq)]
pub enum Sites {
    /// 1-based atom indices. Draws beyond the measure's horizon are reported
    /// as fresh atoms `horizon + 1 + draw_index`, so they never coincide.
    Atoms(Vec<usize>),
    /// Points of the unit cube, `dim` coordinates per site, row-major.
    Points { dim: usize, coords: Vec<f64> },
}

impl Sites {
    pub fn len(&self) -> usize {
        match self {
            Sites::Atoms(v) => v.len(),
            Sites::Points { dim, coords } => coords.len() / dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `j` i.i.d. sites from the normalised law.
pub fn sample_sites<R: Rng + ?Sized>(law: SiteLaw<'_>, j: usize, rng: &mut R) -> Result<Sites> {
    match law {
        SiteLaw::Discrete(m) => {
            let mut v = Vec::with_capacity(j);
            for i in 0..j {
                v.push(m.sample(rng).unwrap_or(m.horizon() + 1 + i));
            }
            Ok(Sites::Atoms(v))
        }
        SiteLaw::UnitCube { dim } => {
            if dim == 0 {
                return invalid("dim", "unit cube needs dimension >= 1");
            }
            let coords = (0..j * dim).map(|_| Open01.sample(rng)).collect();
            Ok(Sites::Points { dim, coords })
        }
    }
}

/// Arrival times together with their sample sites.
#[derive(Debug, Clone, PartialEq)]
pub struct LePageStream {
    pub gammas: Vec<f64>,
    pub sites: Sites,
}

impl LePageStream {
    /// Draws `j` arrivals, then `j` sites, from one generator.
    pub fn draw<R: Rng + ?Sized>(law: SiteLaw<'_>, j: usize, rng: &mut R) -> Result<Self> {
        if j == 0 {
            return invalid("terms", "need at least one series term");
        }
        let gammas = gamma_arrivals(j, rng);
        let sites = sample_sites(law, j, rng)?;
        Ok(Self { gammas, sites })
    }

    pub fn terms(&self) -> usize {
        self.gammas.len()
    }
}

/// Smallest power-of-two truncation `J` with
/// `Σ_{j>J} j^{-2/α} ≤ 1e-4 Σ_{j≤J} j^{-2/α}`, or `None` past `2^40`.
pub fn lepage_min_terms(alpha: StableIndex) -> Option<u64> {
    let s = 2.0 / alpha.0;
    if s <= 1.0 {
        return None;
    }
    let mut j: u64 = 1;
    while j <= 1 << 40 {
        // partial sum by direct summation of the first terms plus an
        // Euler–Maclaurin integral for the rest
        let head = 64.min(j);
        let mut partial = 0.0;
        for i in 1..=head {
            partial += (i as f64).powf(-s);
        }
        if j > head {
            let a = head as f64 + 0.5;
            let b = j as f64 + 0.5;
            partial += (a.powf(1.0 - s) - b.powf(1.0 - s)) / (s - 1.0);
        }
        let tail = (j as f64 + 0.5).powf(1.0 - s) / (s - 1.0);
        if tail <= 1e-4 * partial {
            return Some(j);
        }
        j *= 2;
    }
    None
}

/// Default LePage truncation: `10^4` terms for `α ≥ 1`, `10^3` below.
pub fn lepage_default_terms(alpha: StableIndex) -> usize {
    if alpha.0 >= 1.0 {
        10_000
    } else {
        1_000
    }
}

/// `E[Σ_{j>J} Γ_j^{-2/α} | Γ_J]` for the Poisson arrivals beyond the last kept one.
pub fn lepage_remainder_mean(alpha: StableIndex, last_gamma: f64) -> f64 {
    let s = 2.0 / alpha.0;
    last_gamma.powf(1.0 - s) / (s - 1.0)
}
