//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All of the scheduling math (processing times, communication delays, LP
//! pivots, bound arithmetic) is written against [`Scalar`], so the same code
//! runs in `f64` (the default, see the aliases at the crate root) or `f32`.
//! Tolerances live on the trait because a `1e-9` comparison is meaningless in
//! single precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type usable by the scheduler, the LP solver and the analyses.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Absolute tolerance for time comparisons and tie detection.
    const TIME_TOL: Self;
    /// Smallest magnitude accepted as a simplex pivot.
    const PIVOT_TOL: Self;
    /// Constraint violation accepted in an optimal LP point.
    const FEAS_TOL: Self;
    /// Relative slack accepted by bound reports.
    const REPORT_TOL: Self;

    /// Converts an `f64` literal; every literal used in the crate is representable.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `a <= b` up to [`Scalar::TIME_TOL`].
    fn le_tol(self, other: Self) -> bool {
        self <= other + Self::TIME_TOL
    }

    /// `|a - b| <= TIME_TOL`.
    fn approx_eq(self, other: Self) -> bool {
        (self - other).abs() <= Self::TIME_TOL
    }
}

impl Scalar for f64 {
    const TIME_TOL: Self = 1e-9;
    const PIVOT_TOL: Self = 1e-9;
    const FEAS_TOL: Self = 1e-7;
    const REPORT_TOL: Self = 1e-6;
}

impl Scalar for f32 {
    const TIME_TOL: Self = 1e-4;
    const PIVOT_TOL: Self = 1e-6;
    const FEAS_TOL: Self = 1e-3;
    const REPORT_TOL: Self = 1e-3;
}

/// Total order over scalars for sorting; NaN never occurs in validated inputs.
pub(crate) fn cmp<T: Scalar>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
}
