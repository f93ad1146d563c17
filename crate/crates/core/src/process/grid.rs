use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};

/// Index set on which a path is observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    /// Points `i/points`, `i = 1..=points`, on every axis of `[0,1]^dim`
    /// (row-major, last axis fastest). Cells carry measure `points^-dim`.
    Lattice { points: usize, dim: usize },
    /// Indices `1..=len` with counting measure.
    Sequence { len: usize },
    /// Dyadic blocks `n = 1..=levels`, block `n` holding `2^n` entries.
    Blocks { levels: u32 },
}

impl Grid {
    pub fn uniform(points: usize) -> Self {
        Grid::Lattice { points, dim: 1 }
    }

    pub fn len(&self) -> usize {
        match *self {
            Grid::Lattice { points, dim } => points.pow(dim as u32),
            Grid::Sequence { len } => len,
            Grid::Blocks { levels } => (1usize << (levels + 1)) - 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            Grid::Lattice { points, dim } => {
                if points == 0 || dim == 0 {
                    return invalid("grid", "lattice needs at least one point and one axis");
                }
                if (points as f64).powi(dim as i32) > 1e9 {
                    return invalid("grid", "lattice too large");
                }
            }
            Grid::Sequence { len } => {
                if len == 0 {
                    return invalid("grid", "empty sequence");
                }
            }
            Grid::Blocks { levels } => {
                if levels == 0 || levels > 40 {
                    return invalid("grid", "block levels must lie in 1..=40");
                }
            }
        }
        Ok(())
    }
}

/// A realisation on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl PathSample {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid("values", alloc::format!("{} values for a grid of {}", values.len(), grid.len()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: alloc::vec![0.0; grid.len()] }
    }
}
