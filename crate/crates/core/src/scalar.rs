//! Scalar abstraction for norm evaluation.
//!
//! The evaluation kernel is generic over the scalar: `Rat` drives every
//! certified exact path, `f64` drives sampling and rendering. Concrete
//! aliases live at the crate root.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rat;

/// Types the norm-evaluation kernel can run over.
pub trait Scalar: Clone + Zero + One + Signed + PartialOrd {
    /// Convert a rational constant (e.g. a polytope functional entry).
    fn from_rat(r: &Rat) -> Self;
}

impl Scalar for f64 {
    fn from_rat(r: &Rat) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

/// Raw norm evaluation result over a scalar T: either the value itself or
/// the value's square (for the Euclidean norm, whose square is scalar).
#[derive(Clone, Debug, PartialEq)]
pub enum RawNorm<T> {
    Value(T),
    SqrtOf(T),
}
