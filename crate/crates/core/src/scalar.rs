//! The integer scalar abstraction used by the linear algebra layer.
//!
//! Everything in [`crate::matrix`], [`crate::smith`], [`crate::hermite`] and
//! [`crate::solve`] is written against [`Scalar`], so the same code runs on
//! machine integers (useful for quick experiments and property tests) and on
//! [`num_bigint::BigInt`], which is what the group-theoretic layers use.
//! Machine integers can overflow during Smith reduction; only the big integer
//! instantiation is exact.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// A signed Euclidean ring element with a total order compatible with
/// absolute values.
pub trait Scalar:
    Clone + Debug + Display + Ord + Integer + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Lifts a small integer into the scalar type.
    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("small integer fits every scalar type")
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + Ord + Integer + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

/// Arbitrary precision integer; the scalar of every presentation in this crate.
pub type Int = BigInt;

/// Extended Euclid: returns `(g, s, t)` with `s·a + t·b = g` and `g ≥ 0`.
pub fn ext_gcd<T: Scalar>(a: &T, b: &T) -> (T, T, T) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (T::one(), T::zero());
    let (mut old_t, mut t) = (T::zero(), T::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = old_r - q.clone() * r.clone();
        old_r = std::mem::replace(&mut r, nr);
        let ns = old_s - q.clone() * s.clone();
        old_s = std::mem::replace(&mut s, ns);
        let nt = old_t - q * t.clone();
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}
