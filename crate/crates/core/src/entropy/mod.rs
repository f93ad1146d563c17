//! Random-partition diagonal operators, distinct-value counts and
//! entropy-number surrogates.

mod diagonal;
mod surrogate;

pub use diagonal::{
    distinct_count_mc, expected_distinct, fit_rearrangement, fit_sequence, random_diagonal, DistinctCounter,
    ExpectedDistinct, RandomDiagonal,
};
pub use surrogate::{
    check_regularity, gap_curve, interval_allocation, kuhn_entropy, DiagonalSpec, EntropyCurve, GapCurve,
    IntervalAllocation, Regularity,
};
