//! Path samplers for stable integral processes and their norms.

mod grid;
mod kernel;
mod lepage;
mod maxima;
pub(crate) mod norm;
mod theta;

pub use grid::{Grid, PathSample};
pub use kernel::{sample_path_increments, IncrementSampler, KernelSpec, Weight};
pub use lepage::{sample_path_lepage, LePagePath, LePageSampler};
pub use maxima::{
    diagonal_tail_certificate, maxima_bias_certificate, sum_of_maxima_array, sum_of_maxima_sample, DiagonalVector,
    SumOfMaxima, DEFAULT_MAX_LEVELS,
};
pub use norm::{norm, NormSpec};
pub use theta::ThetaSeq;
