#[allow(unused_imports)]
use num_traits::Float;

use super::grid::{Grid, PathSample};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    /// `(∫|x|^q)^{1/q}`; rectangle rule on lattices, plain sum on sequences.
    Lq(f64),
    Sup,
    /// `Σ_n max_{l ≤ 2^n} |x_{n,l}|`.
    BlockL1LinfPow2 { levels: u32 },
}

impl NormSpec {
    pub fn lq(q: f64) -> Result<Self> {
        if !(q >= 1.0 && q.is_finite()) {
            return invalid("q", alloc::format!("must satisfy 1 <= q < inf, got {q}"));
        }
        Ok(NormSpec::Lq(q))
    }

    /// Whether this norm applies to paths on `grid`.
    pub fn check(&self, grid: &Grid) -> Result<()> {
        match (*self, *grid) {
            (NormSpec::Lq(q), Grid::Lattice { .. } | Grid::Sequence { .. }) => NormSpec::lq(q).map(|_| ()),
            (NormSpec::Lq(_), Grid::Blocks { .. }) => invalid("norm", "Lq is not defined on block arrays"),
            (NormSpec::Sup, _) => Ok(()),
            (NormSpec::BlockL1LinfPow2 { levels }, Grid::Blocks { levels: l }) if levels == l => Ok(()),
            (NormSpec::BlockL1LinfPow2 { .. }, _) => invalid("norm", "block structure does not match the path"),
        }
    }
}

pub fn norm(path: &PathSample, spec: &NormSpec) -> Result<f64> {
    spec.check(&path.grid)?;
    if path.values.len() != path.grid.len() {
        return invalid("values", "path length does not match its grid");
    }
    Ok(norm_values(&path.values, &path.grid, spec))
}

pub(crate) fn norm_values(values: &[f64], grid: &Grid, spec: &NormSpec) -> f64 {
    match *spec {
        NormSpec::Sup => values.iter().fold(0.0, |m, x| m.max(x.abs())),
        NormSpec::Lq(q) => {
            let weight = match *grid {
                Grid::Lattice { points, dim } => (points as f64).powi(-(dim as i32)),
                _ => 1.0,
            };
            let s: f64 = if q == 2.0 {
                values.iter().map(|x| x * x).sum()
            } else if q == 1.0 {
                values.iter().map(|x| x.abs()).sum()
            } else {
                values.iter().map(|x| x.abs().powf(q)).sum()
            };
            (s * weight).powf(1.0 / q)
        }
        NormSpec::BlockL1LinfPow2 { levels } => {
            let mut total = 0.0;
            let mut start = 0;
            for n in 1..=levels {
                let w = 1usize << n;
                total += values[start..start + w].iter().fold(0.0, |m, x| m.max(x.abs()));
                start += w;
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn constant_path_lq() {
        let g = Grid::uniform(100);
        let p = PathSample::new(g, alloc::vec![-3.0; 100]).unwrap();
        for q in [1.0, 2.0, 3.5] {
            assert!((norm(&p, &NormSpec::Lq(q)).unwrap() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_path_l2() {
        for g in [64usize, 256, 1024] {
            let v: Vec<f64> = (1..=g).map(|i| i as f64 / g as f64).collect();
            let p = PathSample::new(Grid::uniform(g), v).unwrap();
            let n = norm(&p, &NormSpec::Lq(2.0)).unwrap();
            assert!((n - (1.0f64 / 3.0).sqrt()).abs() < 1.0 / g as f64, "{g}: {n}");
        }
    }

    #[test]
    fn sup_of_spike() {
        let mut v = alloc::vec![0.0; 50];
        v[17] = -4.5;
        let p = PathSample::new(Grid::uniform(50), v).unwrap();
        assert_eq!(norm(&p, &NormSpec::Sup).unwrap(), 4.5);
    }

    #[test]
    fn block_norm_and_mismatch() {
        let g = Grid::Blocks { levels: 2 };
        let p = PathSample::new(g, alloc::vec![1.0, -2.0, 0.5, 0.1, -3.0, 0.2]).unwrap();
        assert_eq!(norm(&p, &NormSpec::BlockL1LinfPow2 { levels: 2 }).unwrap(), 5.0);
        assert!(norm(&p, &NormSpec::BlockL1LinfPow2 { levels: 3 }).is_err());
        let q = PathSample::new(Grid::uniform(6), alloc::vec![0.0; 6]).unwrap();
        assert!(norm(&q, &NormSpec::BlockL1LinfPow2 { levels: 2 }).is_err());
        assert!(norm(&p, &NormSpec::Lq(2.0)).is_err());
        assert!(NormSpec::lq(0.5).is_err());
    }
}
