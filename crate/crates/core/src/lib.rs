//! Numerical core for symmetric α-stable small deviations.
//!
//! Stable variates and LePage series, path samplers for stable integral
//! processes, Monte Carlo small-deviation curves with rate regression,
//! and the random-partition diagonal operators with their entropy-number
//! surrogates. Everything here is `no_std` with `alloc`; file formats and
//! the command line live in the companion `smallball` crate.

#![no_std]
// `!(x > 0.0)` style guards reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod entropy;
pub mod error;
pub mod measure;
pub mod process;
pub mod regression;
pub mod rng;
pub mod smalldev;
pub mod special;
pub mod stable;

pub use error::{Error, Result};
pub use rng::{RngSpec, StreamRng};
pub use stable::StableIndex;
